"""Exhaustive census of pointed-rooted quadrangulations with few faces.

Every labeled tree with N edges is pushed through the same construction as
the sampler.  The tree encoding is a bijection, so each (Dyck word,
increments) pair is one pointed-rooted map and plain counting gives exact
coefficients to compare with the generating functions.
"""

from __future__ import annotations

import csv
import io
import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .mc import kernels_numba

MAX_N = 8


def dyck_words(N: int):
    """All Dyck words of semilength N (1 = up, -1 = down), lexicographically (up first)."""
    def rec(prefix, up, down):
        if up == N and down == N:
            yield tuple(prefix)
            return
        if up < N:
            prefix.append(1)
            yield from rec(prefix, up + 1, down)
            prefix.pop()
        if down < up:
            prefix.append(-1)
            yield from rec(prefix, up, down + 1)
            prefix.pop()
    yield from rec([], 0, 0)


def increment_vectors(N: int):
    """Odometer order over {-1, 0, 1}^N, matching the compiled enumerator."""
    return itertools.product((-1, 0, 1), repeat=N)


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


def rooted_quadrangulation_count(N: int) -> int:
    """Rooted quadrangulations with N faces: 2 * 3^N * Cat(N) / (N + 2)."""
    return 2 * 3**N * catalan(N) // (N + 2)


@dataclass
class Census:
    """Exact census at fixed N.

    ``ks[i]`` is the distance of x1 for encoding i (encodings ordered by
    Dyck word, then increments).  ``hulls`` rows are
    ``(encoding, d, volume, perimeter)``.
    """

    N: int
    words: list
    ks: np.ndarray
    hulls: np.ndarray
    counts_by_k: dict = field(default_factory=dict)
    prescription: str = "origin"

    @property
    def total(self) -> int:
        return int(self.ks.shape[0])

    def encoding(self, index: int):
        per_word = 3**self.N
        word = self.words[index // per_word]
        rem = index % per_word
        inc = []
        for _ in range(self.N):
            inc.append(rem % 3 - 1)
            rem //= 3
        return word, tuple(reversed(inc))

    def index_of(self, word, inc) -> int:
        w = self._word_index()[tuple(int(s) for s in word)]
        code = 0
        for v in inc:
            code = code * 3 + (int(v) + 1)
        return w * 3**self.N + code

    @lru_cache(maxsize=None)
    def _word_index(self):
        return {w: i for i, w in enumerate(self.words)}

    def __hash__(self):
        return id(self)

    def hull_table(self) -> dict:
        """{(k, d, V, L): count} over all maps."""
        out: Counter = Counter()
        ks = self.ks
        for idx, d, V, L in self.hulls:
            out[(int(ks[idx]), int(d), int(V), int(L))] += 1
        return dict(out)

    def rows(self):
        """Sorted (N, k, d, V, L, count) rows."""
        return [(self.N, *key, c) for key, c in sorted(self.hull_table().items())]


def enumerate_maps(N: int, allow_large: bool = False, prescription: str = "origin") -> Census:
    """Exhaustive census of all pointed-rooted quadrangulations with N faces.

    ``prescription`` selects the hull convention, as in
    :func:`hullstats.mc.sampler.hull_decompose`.
    """
    if prescription not in ("origin", "maximal"):
        raise ValueError("prescription must be 'origin' or 'maximal'")
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > MAX_N and not allow_large:
        raise ValueError(f"N={N} exceeds the enumeration budget of {MAX_N}; pass allow_large")
    words = list(dyck_words(N))
    ks_parts, hull_parts = [], []
    per_word = 3**N
    for w_index, word in enumerate(words):
        ks, rec = kernels_numba.enumerate_increments(np.array(word, np.int8), per_word * max(N, 1),
                                                     prescription == "origin")
        rec = rec.copy()
        rec[:, 0] += w_index * per_word
        ks_parts.append(ks)
        hull_parts.append(rec)
    ks = np.concatenate(ks_parts)
    hulls = np.concatenate(hull_parts) if hull_parts else np.empty((0, 4), np.int64)
    counts = Counter(int(k) for k in ks)
    return Census(N, words, ks, hulls, dict(sorted(counts.items())), prescription)


_cache: dict = {}


def census(N: int, prescription: str = "origin") -> Census:
    key = (N, prescription)
    if key not in _cache:
        _cache[key] = enumerate_maps(N, prescription=prescription)
    return _cache[key]


def hull_census(N: int, k: int, d: int, prescription: str = "origin") -> dict:
    """Exact joint counts {(V, L): count} of hull volume and perimeter at fixed (N, k, d)."""
    if k < 3 or not 2 <= d <= k - 1:
        raise ValueError("hull_census needs k >= 3 and 2 <= d <= k-1")
    c = census(N, prescription)
    out: Counter = Counter()
    ks = c.ks
    for idx, dd, V, L in c.hulls:
        if dd == d and ks[idx] == k:
            out[(int(V), int(L))] += 1
    return dict(sorted(out.items()))


def compare_with_series(k: int, d: int, max_N: int, prescription: str = "origin"):
    """Compare hull censuses with the generating-function coefficients.

    Returns a list of mismatching cells ``(N, k, d, V, L, census, series)``,
    sorted so the smallest offending cell comes first.
    """
    from .gf_engine import G_coeffs

    table = G_coeffs(k, d, max_N, max_N).by_total()
    mismatches = []
    for N in range(1, max_N + 1):
        got = hull_census(N, k, d, prescription)
        want = {key: int(v) for key, v in table.get(N, {}).items()}
        for key in sorted(set(got) | set(want)):
            a, b = got.get(key, 0), want.get(key, 0)
            if a != b:
                mismatches.append((N, k, d, key[0], key[1], a, b))
    return mismatches


def census_csv(N: int, prescription: str = "origin") -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "k", "d", "V", "L", "count"])
    for row in census(N, prescription).rows():
        writer.writerow(row)
    return buf.getvalue()


def f_coefficients_from_census(N: int) -> dict:
    return dict(census(N).counts_by_k)


def exact_k_distribution(N: int) -> dict:
    """P(k) at size N as exact fractions, from the census."""
    c = census(N)
    return {k: Fraction(v, c.total) for k, v in c.counts_by_k.items()}
