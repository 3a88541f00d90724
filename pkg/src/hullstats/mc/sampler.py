"""Uniform pointed-rooted quadrangulations from labeled trees, and their hulls.

A plane tree with N edges whose vertex labels change by -1, 0 or +1 along
each edge (root label 0) encodes one quadrangulation with N faces, an
origin vertex ``x0`` and a root arc leaving the tree root ``x1`` towards a
neighbour closer to ``x0``.  The encoding is one-to-one, so uniform trees
and uniform increments give uniform pointed-rooted maps, and the distance
of a tree vertex to ``x0`` is ``label - min(label) + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._numba import HAVE_NUMBA, default_backend
from . import kernels_numpy

if HAVE_NUMBA:
    from . import kernels_numba
else:  # pragma: no cover - exercised only without numba
    kernels_numba = None


def kernels(backend: str | None = None):
    backend = backend or default_backend()
    if backend == "numba":
        if kernels_numba is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return kernels_numba
    if backend == "numpy":
        return kernels_numpy
    raise ValueError(f"unknown backend {backend!r}")


@dataclass
class QuadMap:
    """Half-edge quadrangulation with distance labels.

    Vertices ``0..N`` are tree vertices (``0`` is ``x1``), vertex ``N+1`` is
    ``x0``.  Arc ``t`` has half-edges ``2t`` (tail) and ``2t+1`` (head); the
    root arc is arc 0, from ``x1`` towards distance ``k-1``.
    """

    n_faces: int
    vertex_at: np.ndarray
    label: np.ndarray
    succ: np.ndarray
    head: np.ndarray
    nxt: np.ndarray
    face_of: np.ndarray
    face_half: np.ndarray
    dist: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return self.vertex_at.shape[0] // 2

    @property
    def n_vertices(self) -> int:
        return self.N + 2

    @property
    def n_edges(self) -> int:
        return self.vertex_at.shape[0]

    @property
    def origin(self) -> int:
        return self.N + 1

    @property
    def k(self) -> int:
        return int(self.dist[0])

    @property
    def root_face(self) -> int:
        return int(self.face_of[0])

    @property
    def origin_face(self) -> int:
        """A face incident to x0."""
        t = int(np.flatnonzero(self.succ < 0)[0])
        return int(self.face_of[2 * t + 1])

    def vertex_of_half(self) -> np.ndarray:
        out = np.empty(2 * self.n_edges, np.int32)
        out[0::2] = self.vertex_at
        out[1::2] = self.head
        return out

    def tail_dist(self) -> np.ndarray:
        return self.dist[self.vertex_at]

    def face_vertex_dists(self) -> np.ndarray:
        """(N, 4) array of distances around each face."""
        voh = self.vertex_of_half()
        return self.dist[voh[self.face_half]].reshape(-1, 4)


@dataclass(frozen=True)
class HullObservation:
    k: int
    d: int
    hull_volume: int
    hull_perimeter: int
    complement_volume: int


def tree_from_rng(N: int, rng: np.random.Generator, backend: str | None = None):
    """Uniform Dyck word of length 2N and uniform increments in {-1, 0, 1}."""
    K = kernels(backend)
    steps = np.concatenate((np.ones(N, np.int8), -np.ones(N + 1, np.int8)))
    steps = rng.permutation(steps)
    word = K.dyck_from_steps(steps)
    inc = rng.integers(-1, 2, size=N).astype(np.int64)
    return word, inc


def distances_from_labels(label: np.ndarray) -> np.ndarray:
    dist = np.empty(label.shape[0] + 1, np.int64)
    dist[:-1] = label - label.min() + 1
    dist[-1] = 0
    return dist


def map_from_tree(word, inc, backend: str | None = None, labels=None) -> QuadMap:
    """Run the tree-to-map construction (shared by the sampler and the enumerator)."""
    K = kernels(backend)
    word = np.ascontiguousarray(word, dtype=np.int8)
    inc = np.ascontiguousarray(inc, dtype=np.int64)
    if labels is None:
        labels = K.contour_labels(word, inc)
    vertex_at, label = labels
    succ, head, nxt, face_of, face_half, nf = K.build_map(vertex_at, label)
    return QuadMap(int(nf), vertex_at, label, succ, head, nxt, face_of, face_half,
                   distances_from_labels(label))


def rng_for(seed: int, index: int) -> np.random.Generator:
    """Private stream for sample ``index``: counter-mode split of ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_map(N: int, seed: int, backend: str | None = None) -> QuadMap:
    """Exactly uniform pointed-rooted quadrangulation with N faces."""
    if N < 1:
        raise ValueError("N must be >= 1")
    word, inc = tree_from_rng(N, np.random.default_rng(seed), backend)
    return map_from_tree(word, inc, backend)


PRESCRIPTIONS = ("origin", "maximal")


def hull_decompose(qmap: QuadMap, d: int, backend: str | None = None,
                   prescription: str = "origin", return_mask: bool = False):
    """Hull at distance d.

    First flood from the root face without crossing an edge between
    distances d-1 and d.  With ``prescription="maximal"`` the hull is
    every face not flooded.  With the default ``"origin"`` the hull is only
    the hole of unflooded faces around x0 (connected through any shared
    edge); other holes are counted with x1's side.  The default reproduces
    the hull generating function coefficient by coefficient.

    With ``return_mask`` the boolean hull mask over faces is returned too.
    """
    if prescription not in PRESCRIPTIONS:
        raise ValueError(f"prescription must be one of {PRESCRIPTIONS}")
    k = qmap.k
    if not 2 <= d <= k - 1:
        raise ValueError(f"d={d} outside 2..k-1 for k={k}")
    K = kernels(backend)
    reached_count, perim, reached = K.flood_hull(
        qmap.face_of, qmap.face_half, qmap.tail_dist(), qmap.n_faces, qmap.root_face, d)
    if prescription == "maximal":
        volume = qmap.n_faces - int(reached_count)
        mask = reached == 0
    else:
        volume, perim, hole = K.origin_hole(qmap.face_of, qmap.face_half, reached,
                                           qmap.n_faces, qmap.origin_face)
        mask = hole != 0
    obs = HullObservation(k, d, int(volume), int(perim), qmap.n_faces - int(volume))
    if return_mask:
        return obs, np.asarray(mask, bool)
    return obs


def audit_map(qmap: QuadMap, check_bfs: bool = True, backend: str | None = None) -> list[str]:
    """Structural checks; returns a list of failures (empty when all pass)."""
    problems = []
    N = qmap.N
    if qmap.n_faces != N:
        problems.append(f"face count {qmap.n_faces} != N={N}")
    sizes = np.bincount(qmap.face_of, minlength=qmap.n_faces)
    if np.any(sizes != 4):
        problems.append("face of degree != 4")
    V, E, F = qmap.n_vertices, qmap.n_edges, qmap.n_faces
    if V - E + F != 2:
        problems.append(f"Euler characteristic {V - E + F} != 2")
    voh = qmap.vertex_of_half()
    diff = np.abs(qmap.dist[voh[0::2]] - qmap.dist[voh[1::2]])
    if np.any(diff != 1):
        problems.append("edge joining vertices whose distances differ by != 1")
    if qmap.dist[qmap.head[0]] != qmap.k - 1:
        problems.append("root arc does not point towards x0")
    if check_bfs:
        bfs = kernels(backend).bfs_distances(qmap.nxt, voh, qmap.n_vertices, qmap.origin)
        if not np.array_equal(np.asarray(bfs), qmap.dist):
            problems.append("label distances differ from breadth-first distances")
    return problems
