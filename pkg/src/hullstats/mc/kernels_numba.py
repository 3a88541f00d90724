"""Compiled kernels for the labeled-tree construction and hull flooding.

Half-edge layout: corner ``t`` of the tree contour emits arc ``t`` towards
its successor (next corner, cyclically, whose label is one less, or the
origin vertex when no such corner exists).  Half-edge ``2t`` sits at the
tail of arc t and ``2t + 1`` at its head.  ``nxt`` is the rotation around
vertices and faces are the orbits of ``h -> nxt[h ^ 1]``.
"""

import numpy as np

from .._numba import njit


@njit(cache=True)
def dyck_from_steps(steps):
    """Cyclic-lemma rotation of a +-1 sequence with one more -1 than +1.

    Returns the first ``2N`` steps of the unique rotation whose proper
    prefix sums stay non-negative: a uniform Dyck word when the input is a
    uniform arrangement.
    """
    n = steps.shape[0]
    s = 0
    best = 0
    arg = -1
    for i in range(n):
        s += steps[i]
        if s < best:
            best = s
            arg = i
    start = arg + 1
    out = np.empty(n - 1, np.int8)
    for i in range(n - 1):
        out[i] = steps[(start + i) % n]
    return out


@njit(cache=True)
def contour_labels(word, inc):
    """Vertex at each contour corner and integer label of each tree vertex."""
    m = word.shape[0]
    n = m // 2
    vertex_at = np.empty(m, np.int32)
    label = np.zeros(n + 1, np.int64)
    path = np.empty(n + 1, np.int32)
    path[0] = 0
    depth = 0
    nv = 1
    vertex_at[0] = 0
    for i in range(m - 1):
        if word[i] == 1:
            v = nv
            nv += 1
            label[v] = label[path[depth]] + inc[v - 1]
            depth += 1
            path[depth] = v
        else:
            depth -= 1
        vertex_at[i + 1] = path[depth]
    return vertex_at, label


@njit(cache=True)
def build_map(vertex_at, label):
    """Successors, rotation system and faces of the quadrangulation.

    Returns ``succ, head, nxt, face_of, face_half, n_faces`` where ``head``
    is the vertex at the head of each arc (``n + 1`` denotes the origin).
    """
    m = vertex_at.shape[0]
    n = m // 2
    x0 = n + 1
    cl = np.empty(m, np.int64)
    for c in range(m):
        cl[c] = label[vertex_at[c]]
    succ = np.full(m, -1, np.int32)
    arr_first = np.full(m, -1, np.int32)
    arr_last = np.full(m, -1, np.int32)
    arr_next = np.full(m, -1, np.int32)
    stack = np.empty(m, np.int32)
    sp = 0
    for lap in range(2):
        for c in range(m):
            lc = cl[c]
            while sp > 0 and cl[stack[sp - 1]] == lc + 1:
                t = stack[sp - 1]
                sp -= 1
                succ[t] = c
                if arr_last[c] == -1:
                    arr_first[c] = t
                else:
                    arr_next[arr_last[c]] = t
                arr_last[c] = t
            if lap == 0:
                stack[sp] = c
                sp += 1

    head = np.empty(m, np.int32)
    for t in range(m):
        head[t] = vertex_at[succ[t]] if succ[t] >= 0 else x0

    nh = 2 * m
    nxt = np.empty(nh, np.int32)
    first = np.full(n + 2, -1, np.int32)
    last = np.full(n + 2, -1, np.int32)
    for c in range(m):
        v = vertex_at[c]
        t = arr_first[c]
        while t != -1:
            h = 2 * t + 1
            if last[v] == -1:
                first[v] = h
            else:
                nxt[last[v]] = h
            last[v] = h
            t = arr_next[t]
        h = 2 * c
        if last[v] == -1:
            first[v] = h
        else:
            nxt[last[v]] = h
        last[v] = h
    for t in range(m - 1, -1, -1):
        if succ[t] == -1:
            h = 2 * t + 1
            if last[x0] == -1:
                first[x0] = h
            else:
                nxt[last[x0]] = h
            last[x0] = h
    for v in range(n + 2):
        if last[v] != -1:
            nxt[last[v]] = first[v]

    face_of = np.full(nh, -1, np.int32)
    face_half = np.full(nh, -1, np.int32)
    nf = 0
    pos = 0
    for h in range(nh):
        if face_of[h] != -1:
            continue
        g = h
        while face_of[g] == -1:
            face_of[g] = nf
            face_half[pos] = g
            pos += 1
            g = nxt[g ^ 1]
        nf += 1
    return succ, head, nxt, face_of, face_half, nf


@njit(cache=True)
def flood_hull(face_of, face_half, tail_dist, n_faces, root_face, d):
    """Flood from ``root_face`` without crossing arcs whose tail is at distance d.

    Every arc joins distances D and D-1, so these are exactly the edges
    between distance d-1 and d.  Returns (reached face count, perimeter),
    the perimeter being the number of such edges with the flooded region
    on exactly one side.  Faces must have degree 4 (``face_half`` groups
    the half-edges of face f at positions 4f..4f+3).
    """
    reached = np.zeros(n_faces, np.uint8)
    stack = np.empty(n_faces, np.int32)
    sp = 0
    reached[root_face] = 1
    stack[0] = root_face
    sp = 1
    count = 1
    while sp > 0:
        sp -= 1
        f = stack[sp]
        for j in range(4):
            h = face_half[4 * f + j]
            if tail_dist[h >> 1] == d:
                continue
            g = face_of[h ^ 1]
            if reached[g] == 0:
                reached[g] = 1
                count += 1
                stack[sp] = g
                sp += 1
    perim = 0
    for t in range(tail_dist.shape[0]):
        if tail_dist[t] == d:
            if reached[face_of[2 * t]] != reached[face_of[2 * t + 1]]:
                perim += 1
    return count, perim, reached


@njit(cache=True)
def origin_hole(face_of, face_half, reached, n_faces, origin_face):
    """Restrict the hull to the hole of the unreached region that touches x0.

    Unreached faces split into holes (connected through any shared edge);
    the hull proper is the hole containing the faces around the origin.
    Returns (hole face count, hole perimeter, mask).
    """
    hole = np.zeros(n_faces, np.uint8)
    stack = np.empty(n_faces, np.int32)
    hole[origin_face] = 1
    stack[0] = origin_face
    sp = 1
    count = 1
    perim = 0
    while sp > 0:
        sp -= 1
        f = stack[sp]
        for j in range(4):
            h = face_half[4 * f + j]
            g = face_of[h ^ 1]
            if reached[g] != 0:
                perim += 1
            elif hole[g] == 0:
                hole[g] = 1
                count += 1
                stack[sp] = g
                sp += 1
    return count, perim, hole


@njit(cache=True)
def bfs_distances(nxt, vertex_of_half, n_vertices, source):
    """Graph distances from ``source`` following the rotation system."""
    nh = nxt.shape[0]
    # one representative half-edge per vertex
    rep = np.full(n_vertices, -1, np.int32)
    for h in range(nh):
        v = vertex_of_half[h]
        if rep[v] == -1:
            rep[v] = h
    dist = np.full(n_vertices, -1, np.int64)
    queue = np.empty(n_vertices, np.int32)
    qh = 0
    qt = 0
    dist[source] = 0
    queue[qt] = source
    qt += 1
    while qh < qt:
        v = queue[qh]
        qh += 1
        h0 = rep[v]
        h = h0
        while True:
            w = vertex_of_half[h ^ 1]
            if dist[w] == -1:
                dist[w] = dist[v] + 1
                queue[qt] = w
                qt += 1
            h = nxt[h]
            if h == h0:
                break
    return dist


@njit(cache=True)
def enumerate_increments(word, max_records, origin_only):
    """Build the map of every increment vector for one Dyck word.

    Increments run through {-1, 0, 1}^N in odometer order (last vertex
    fastest).  Returns ``ks`` (distance of x1 per map) and hull records
    ``(map index, d, volume, perimeter)`` for every 2 <= d <= k-1.
    """
    m = word.shape[0]
    n = m // 2
    total = 1
    for _ in range(n):
        total *= 3
    ks = np.empty(total, np.int64)
    rec = np.empty((max_records, 4), np.int64)
    nrec = 0
    inc = np.full(n, -1, np.int64)
    for idx in range(total):
        vertex_at, label = contour_labels(word, inc)
        lmin = label.min()
        k = 1 - lmin
        ks[idx] = k
        if k >= 3:
            succ, head, nxt, face_of, face_half, nf = build_map(vertex_at, label)
            tail_dist = np.empty(m, np.int64)
            for t in range(m):
                tail_dist[t] = label[vertex_at[t]] - lmin + 1
            root_face = face_of[0]
            origin_face = 0
            for t in range(m):
                if succ[t] == -1:
                    origin_face = face_of[2 * t + 1]
                    break
            for d in range(2, k):
                cnt, perim, reached = flood_hull(face_of, face_half, tail_dist, nf, root_face, d)
                vol = nf - cnt
                if origin_only:
                    vol, perim, _ = origin_hole(face_of, face_half, reached, nf, origin_face)
                rec[nrec, 0] = idx
                rec[nrec, 1] = d
                rec[nrec, 2] = vol
                rec[nrec, 3] = perim
                nrec += 1
        # odometer step
        j = n - 1
        while j >= 0:
            inc[j] += 1
            if inc[j] <= 1:
                break
            inc[j] = -1
            j -= 1
    return ks, rec[:nrec]
