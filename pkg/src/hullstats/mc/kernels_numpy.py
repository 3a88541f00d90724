"""Vectorized numpy/scipy versions of the construction kernels.

They reproduce :mod:`kernels_numba` exactly (same arrays, same numbering)
and are used when numba is unavailable or disabled.
"""

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path


def dyck_from_steps(steps):
    s = np.cumsum(steps.astype(np.int64))
    arg = int(np.argmin(s))
    if s[arg] >= 0:
        arg = -1
    return np.roll(steps, -(arg + 1))[:-1].astype(np.int8)


def contour_labels(word, inc):
    m = word.shape[0]
    n = m // 2
    w = word[: m - 1].astype(np.int64)
    depth = np.concatenate(([0], np.cumsum(w)))
    up = np.concatenate(([True], w == 1))
    # vertex ids are assigned in order of up steps; corner c belongs to the
    # latest vertex created at its depth
    vid = np.cumsum(up) - 1
    order = np.lexsort((np.arange(m), depth))
    big = n + 2
    marker = np.where(up, depth * big + vid, depth * big - 1)[order]
    latest = np.maximum.accumulate(marker)
    vertex_at = np.empty(m, np.int64)
    vertex_at[order] = latest - depth[order] * big
    vertex_at = vertex_at.astype(np.int32)
    # labels: +inc entering a vertex, -inc leaving it
    delta = np.zeros(m, np.int64)
    step_up = w == 1
    entered = vertex_at[1:]
    left = vertex_at[:-1]
    delta[1:][step_up] = inc[entered[step_up] - 1]
    delta[1:][~step_up] = -inc[left[~step_up] - 1]
    corner_label = np.cumsum(delta)
    label = np.zeros(n + 1, np.int64)
    label[vertex_at] = corner_label
    return vertex_at, label


def _successors(cl):
    m = cl.shape[0]
    span = m + 1
    pos = np.arange(m, dtype=np.int64)
    keys = cl * span + pos
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    target_label = cl - 1
    idx = np.searchsorted(sorted_keys, target_label * span + pos, side="right")
    start = np.searchsorted(sorted_keys, target_label * span, side="left")
    ok = idx < m
    same = np.zeros(m, bool)
    same[ok] = sorted_keys[idx[ok]] // span == target_label[ok]
    # wrap around to the first corner carrying the target label
    idx = np.where(same, idx, start)
    has = idx < m
    has[has] = sorted_keys[idx[has]] // span == target_label[has]
    succ = np.full(m, -1, np.int64)
    succ[has] = order[idx[has]]
    return succ


def build_map(vertex_at, label):
    m = vertex_at.shape[0]
    n = m // 2
    x0 = n + 1
    cl = label[vertex_at].astype(np.int64)
    succ = _successors(cl)
    has = succ >= 0
    head = np.where(has, vertex_at[np.where(has, succ, 0)], x0).astype(np.int32)

    nh = 2 * m
    t = np.arange(m, dtype=np.int64)
    # sort key for the rotation: (vertex, corner, offset) with arrivals at a
    # corner ordered by cyclic distance back to their tail, then the leaving arc
    vert = np.empty(nh, np.int64)
    corner = np.empty(nh, np.int64)
    sub = np.empty(nh, np.int64)
    vert[0::2] = vertex_at
    corner[0::2] = t
    sub[0::2] = m
    vert[1::2] = head
    corner[1::2] = np.where(has, succ, 0)
    sub[1::2] = np.where(has, (succ - t) % m, m - t)
    order = np.lexsort((sub, corner, vert))
    sv = vert[order]
    nxt = np.empty(nh, np.int64)
    nxt[order[:-1]] = order[1:]
    # close each vertex cycle
    starts = np.flatnonzero(np.concatenate(([True], sv[1:] != sv[:-1])))
    ends = np.concatenate((starts[1:], [nh])) - 1
    nxt[order[ends]] = order[starts]
    nxt = nxt.astype(np.int32)

    phi = nxt[np.arange(nh) ^ 1]
    graph = coo_matrix((np.ones(nh, np.int8), (np.arange(nh), phi)), shape=(nh, nh))
    n_faces, comp = connected_components(graph, directed=True, connection="weak")
    # renumber faces in order of their smallest half-edge (matches the compiled tracer)
    first_seen = np.full(n_faces, nh, np.int64)
    np.minimum.at(first_seen, comp, np.arange(nh))
    rank = np.empty(n_faces, np.int64)
    rank[np.argsort(first_seen)] = np.arange(n_faces)
    face_of = rank[comp].astype(np.int32)
    # face_half: half-edges of each face in orbit order starting from the smallest
    face_half = np.empty(nh, np.int32)
    counts = np.bincount(face_of, minlength=n_faces)
    offs = np.concatenate(([0], np.cumsum(counts)[:-1]))
    cur = np.sort(first_seen)
    length = counts[np.arange(n_faces)]
    for step in range(int(counts.max()) if n_faces else 0):
        live = step < length
        face_half[offs[live] + step] = cur[live]
        cur = np.where(live, phi[cur], cur)
    return succ.astype(np.int32), head, nxt, face_of, face_half, int(n_faces)


def flood_hull(face_of, face_half, tail_dist, n_faces, root_face, d):
    m = tail_dist.shape[0]
    open_arc = tail_dist != d
    a = face_of[0::2][open_arc]
    b = face_of[1::2][open_arc]
    graph = coo_matrix((np.ones(a.shape[0], np.int8), (a, b)), shape=(n_faces, n_faces))
    _, comp = connected_components(graph, directed=False)
    reached = (comp == comp[root_face]).astype(np.uint8)
    blocked = ~open_arc
    fa = reached[face_of[0::2][blocked]]
    fb = reached[face_of[1::2][blocked]]
    perim = int(np.count_nonzero(fa != fb))
    return int(reached.sum()), perim, reached


def origin_hole(face_of, face_half, reached, n_faces, origin_face):
    a = face_of[0::2]
    b = face_of[1::2]
    inner = (reached[a] == 0) & (reached[b] == 0)
    graph = coo_matrix((np.ones(int(inner.sum()), np.int8), (a[inner], b[inner])),
                       shape=(n_faces, n_faces))
    _, comp = connected_components(graph, directed=False)
    hole = ((comp == comp[origin_face]) & (reached == 0)).astype(np.uint8)
    perim = int(np.count_nonzero(hole[a] != hole[b]))
    return int(hole.sum()), perim, hole


def bfs_distances(nxt, vertex_of_half, n_vertices, source):
    nh = nxt.shape[0]
    u = vertex_of_half
    v = vertex_of_half[np.arange(nh) ^ 1]
    graph = coo_matrix((np.ones(nh), (u, v)), shape=(n_vertices, n_vertices)).tocsr()
    graph.data[:] = 1.0
    dist = shortest_path(graph, unweighted=True, indices=source)
    return np.where(np.isinf(dist), -1, dist).astype(np.int64)
