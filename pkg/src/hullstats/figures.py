"""Plot-ready tables for the standard figures.

Each builder returns a :class:`FigureTable` (column names, rows and a short
description of the plotted formula); :func:`write_csv` serializes it with
``#`` metadata lines.  Figures 2-8 are limit laws, 9 and 12-13
compare finite k with the limit, and 14 is the complement volume; 10 and 11
are drawings with no data.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import finite_laws, limit_laws
from .families import Family

U_EIGHTHS = tuple(j / 8 for j in range(1, 8))
U_FOUR = (0.25, 0.5, 0.75, 0.9)
L_VALUES = (0.0, 0.1, 0.5, 1.0, 2.0)


@dataclass
class FigureTable:
    figure: int
    description: str
    columns: list
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(table: FigureTable, metadata=()) -> str:
    buf = io.StringIO()
    buf.write(f"# figure {table.figure}: {table.description}\n")
    for line in (*table.notes, *metadata):
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _grid(lo, hi, n):
    return [float(x) for x in np.linspace(lo, hi, n)]


def fig2(family=Family.QUADRANGULATION, n=101) -> FigureTable:
    t = FigureTable(2, "regime probabilities p_out(u) = (4-7u^6+3u^7)/4, p_in(u) = (7-3u)u^6/4",
                    ["u", "p_out", "p_in"])
    for u in _grid(0, 1, n):
        t.rows.append([u, limit_laws.regime_probability(u, "out"), limit_laws.regime_probability(u, "in")])
    return t


def fig3(family=Family.QUADRANGULATION, n=301, L_max=3.0) -> FigureTable:
    cols = ["L"] + [f"out[u={u:g}]" for u in U_EIGHTHS] + ["out[u->0]", "out[u->1]"]
    t = FigureTable(3, "conditional out-regime perimeter density D_out(L,u)/p_out(u) and its u->0, u->1 limits",
                    cols, notes=[f"family {Family.parse(family).roman}"])
    for L in _grid(0, L_max, n):
        row = [L]
        for u in U_EIGHTHS:
            row.append(float(limit_laws.perimeter_density(L, u, "out", family)) / limit_laws.regime_probability(u, "out"))
        row.append(limit_laws.perimeter_density_limit(L, "out_u0", family))
        row.append(limit_laws.perimeter_density_limit(L, "out_u1", family))
        t.rows.append(row)
    return t


def fig4(family=Family.QUADRANGULATION, n=301, L_max=3.0) -> FigureTable:
    cols = ["L"] + [f"in[u={u:g}]" for u in U_EIGHTHS] + ["in[u->0]"]
    t = FigureTable(4, "conditional in-regime perimeter density D_in(L,u)/p_in(u) and its u->0 limit",
                    cols, notes=[f"family {Family.parse(family).roman}"])
    for L in _grid(0, L_max, n):
        row = [L]
        for u in U_EIGHTHS:
            row.append(float(limit_laws.perimeter_density(L, u, "in", family)) / limit_laws.regime_probability(u, "in"))
        row.append(limit_laws.perimeter_density_limit(L, "in_u0", family))
        t.rows.append(row)
    return t


def fig5(family=Family.QUADRANGULATION, n=301, X_max=3.0) -> FigureTable:
    """In-regime density in ``X = L/(cB)``: ``c B D_in(cBX, u) / p_in(u)``."""
    cols = ["X"] + [f"in_X[u={u:g}]" for u in U_EIGHTHS] + ["in_X[u->1]"]
    t = FigureTable(5, "conditional in-regime density in X = L/(cB) and its u->1 limit",
                    cols, notes=[f"family {Family.parse(family).roman}"])
    c = Family.parse(family).c
    for X in _grid(0, X_max, n):
        row = [X]
        for u in U_EIGHTHS:
            cb = c * limit_laws.B_of_u(u)
            row.append(cb * float(limit_laws.perimeter_density(cb * X, u, "in", family))
                       / limit_laws.regime_probability(u, "in"))
        row.append(limit_laws.perimeter_density_limit(X, "in_u1_X", family))
        t.rows.append(row)
    return t


def fig6(family=Family.QUADRANGULATION, n=301, L_max=3.0) -> FigureTable:
    cols = ["L"]
    for u in U_FOUR:
        cols += [f"D_out[u={u:g}]", f"D_in[u={u:g}]", f"D[u={u:g}]"]
    t = FigureTable(6, "joint densities D_out(L,u), D_in(L,u) and their sum D(L,u)",
                    cols, notes=[f"family {Family.parse(family).roman}"])
    for L in _grid(0, L_max, n):
        row = [L]
        for u in U_FOUR:
            a = float(limit_laws.perimeter_density(L, u, "out", family))
            b = float(limit_laws.perimeter_density(L, u, "in", family))
            row += [a, b, a + b]
        t.rows.append(row)
    return t


def fig7(family=Family.QUADRANGULATION, n=301, L_max=3.0) -> FigureTable:
    cols = ["L"]
    for u in U_FOUR:
        cols += [f"pi_out[u={u:g}]", f"pi_in[u={u:g}]"]
    t = FigureTable(7, "regime posteriors pi_out(L,u), pi_in(L,u) as functions of L",
                    cols, notes=[f"family {Family.parse(family).roman}"])
    for L in _grid(0, L_max, n):
        row = [L]
        for u in U_FOUR:
            row += list(limit_laws.regime_posterior(L, u, family))
        t.rows.append(row)
    return t


def fig8(family=Family.QUADRANGULATION, n=101) -> FigureTable:
    cols = ["u"]
    for L in L_VALUES:
        cols += [f"pi_out[L={L:g}]", f"pi_in[L={L:g}]"]
    t = FigureTable(8, "regime posteriors pi_out(L,u), pi_in(L,u) as functions of u",
                    cols, notes=[f"family {Family.parse(family).roman}"])
    for u in _grid(0, 1, n):
        row = [u]
        for L in L_VALUES:
            row += list(limit_laws.regime_posterior(L, u, family))
        t.rows.append(row)
    return t


def fig9(family=Family.QUADRANGULATION, k=50) -> FigureTable:
    t = FigureTable(9, f"exact finite-k regime probabilities at k={k}, 2<=d<=k-1, against p_out(d/k), p_in(d/k)",
                    ["d", "u", "p_finite", "p_infinite", "p_out_limit", "p_in_limit"],
                    notes=[f"family {Family.parse(family).roman}"])
    for d in range(2, k):
        r = finite_laws.regime_probabilities(k, d, family)
        u = d / k
        t.rows.append([d, u, float(r.p_finite), float(r.p_infinite),
                       limit_laws.regime_probability(u, "out"), limit_laws.regime_probability(u, "in")])
    return t


def _perimeter_fig(number, regime, ks, d_step):
    c = Family.QUADRANGULATION.c
    t = FigureTable(number, f"exact E_k[perimeter | {regime}]/d^2 vs d/k against the limit law",
                    ["k", "d", "u", "L_finite", "L_limit"], notes=["family i, c = 1/3"])
    for k in ks:
        step = max(1, d_step(k))
        for d in list(range(2, k, step)) + ([k - 1] if (k - 3) % step else []):
            u = d / k
            val = float(finite_laws.perimeter_expectation(k, d, regime)) / d**2
            t.rows.append([k, d, u, val, limit_laws.perimeter_expectation_limit(u, regime, c=c)])
    return t


def fig12(ks=(50, 100, 500, 2000), d_step=lambda k: 1) -> FigureTable:
    return _perimeter_fig(12, "out", ks, d_step)


def fig13(ks=(50, 100, 500, 2000), d_step=lambda k: 1) -> FigureTable:
    return _perimeter_fig(13, "in", ks, d_step)


def fig14(family=Family.QUADRANGULATION, n=101) -> FigureTable:
    t = FigureTable(14, "mean complement volume / k^4 in the in-regime vs u",
                    ["u", "W_mean"], notes=[f"family {Family.parse(family).roman}"])
    for u in _grid(0, 1, n):
        t.rows.append([u, limit_laws.complement_volume_mean(u, family)])
    return t


BUILDERS = {2: fig2, 3: fig3, 4: fig4, 5: fig5, 6: fig6, 7: fig7, 8: fig8,
            9: fig9, 12: fig12, 13: fig13, 14: fig14}
FAMILY_AWARE = {2, 3, 4, 5, 6, 7, 8, 9, 14}


def build(which: int, family=Family.QUADRANGULATION, **kw) -> FigureTable:
    if which not in BUILDERS:
        raise ValueError(f"no data for figure {which}; available: {sorted(BUILDERS)}")
    if which in FAMILY_AWARE:
        return BUILDERS[which](family, **kw)
    return BUILDERS[which](**kw)
