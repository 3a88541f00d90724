"""Monte Carlo experiments: plans, parallel sampling and binned estimates.

A plan names the map size, the number of samples, a seed, the k bins to
keep, how d is chosen from k, and which observables to estimate.  Sample
``i`` always draws from its own stream ``rng_for(seed, i)``, so results do
not depend on how samples are split across workers.

At finite N the two regimes are told apart by the proxy "out iff
V(d) <= N/2".
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .sampler import PRESCRIPTIONS, hull_decompose, map_from_tree, rng_for, tree_from_rng

OBSERVABLES = (
    "out_fraction",      # fraction classified out
    "L_out",             # perimeter / d^2 among out samples
    "L_all",             # perimeter / d^2, all samples
    "V_out",             # hull volume / d^4 among out samples
    "W_in",              # complement volume / k^4 among in samples
    "ref_out_fraction",  # exact finite-k out probability averaged over the bin
    "ref_L_out",         # exact finite-k E[perimeter | out] / d^2 averaged over out samples
    "c_fit",             # c that makes the limit E[L | out] match L_out
)


@dataclass(frozen=True)
class ExperimentPlan:
    N: int
    samples: int
    seed: int = 0
    k_bins: tuple = ((20, 40),)
    d_values: tuple = ()          # explicit d list; used when d_ratio is None
    d_ratio: float | None = 0.5   # d = floor(k * ratio + 1/2)
    observables: tuple = ("out_fraction", "L_out", "V_out", "ref_out_fraction", "ref_L_out")
    workers: int = 1
    prescription: str = "origin"
    backend: str | None = None
    chunk: int = 50

    def __post_init__(self):
        if self.N < 1 or self.samples < 1:
            raise ValueError("N and samples must be positive")
        unknown = set(self.observables) - set(OBSERVABLES)
        if unknown:
            raise ValueError(f"unknown observables {sorted(unknown)}")
        if self.prescription not in PRESCRIPTIONS:
            raise ValueError(f"prescription must be one of {PRESCRIPTIONS}")
        if self.d_ratio is None and not self.d_values:
            raise ValueError("give either d_ratio or d_values")
        for lo, hi in self.k_bins:
            if lo > hi:
                raise ValueError(f"empty k bin {lo}-{hi}")

    def d_for(self, k: int) -> list[int]:
        if self.d_ratio is not None:
            ds = [int(math.floor(k * self.d_ratio + 0.5))]
        else:
            ds = list(self.d_values)
        return [d for d in ds if 2 <= d <= k - 1]

    def bin_of(self, k: int):
        for b in self.k_bins:
            if b[0] <= k <= b[1]:
                return b
        return None

    def describe(self) -> str:
        rule = f"d=round({self.d_ratio}k)" if self.d_ratio is not None else "d=" + "|".join(map(str, self.d_values))
        return f"N={self.N} samples={self.samples} seed={self.seed} {rule} prescription={self.prescription}"


def _parse_bins(text: str) -> tuple:
    bins = []
    for part in text.replace(";", ",").split(","):
        part = part.strip()
        if not part:
            continue
        lo, _, hi = part.partition("-")
        bins.append((int(lo), int(hi or lo)))
    return tuple(bins)


def parse_plan(text: str, **overrides) -> ExperimentPlan:
    """Build a plan from ``key = value`` lines (``#`` starts a comment).

    Keys: N, samples, seed, k_bins (``20-40, 50-60``), d (``3,5``) or
    d_ratio, observables, workers, prescription, backend, chunk.
    """
    kv = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        kv[key.lower()] = value
    given = {k.lower(): str(v) for k, v in overrides.items() if v is not None}
    # d and d_ratio are alternatives: one given as an override replaces the other
    if "d" in given and "d_ratio" not in given:
        kv.pop("d_ratio", None)
    if "d_ratio" in given and "d" not in given:
        kv.pop("d", None)
    kv.update(given)
    args = {}
    if "n" in kv:
        args["N"] = int(float(kv.pop("n")))
    for key in ("samples", "seed", "workers", "chunk"):
        if key in kv:
            args[key] = int(float(kv.pop(key)))
    if "k_bins" in kv:
        args["k_bins"] = _parse_bins(kv.pop("k_bins"))
    if "d" in kv:
        args["d_values"] = tuple(int(s) for s in kv.pop("d").split(",") if s.strip())
        args["d_ratio"] = None
    if "d_ratio" in kv:
        args["d_ratio"] = float(kv.pop("d_ratio"))
    if "observables" in kv:
        args["observables"] = tuple(s.strip() for s in kv.pop("observables").split(",") if s.strip())
    for key in ("prescription", "backend"):
        if key in kv:
            args[key] = kv.pop(key)
    if kv:
        raise ValueError(f"unknown config keys {sorted(kv)}")
    if "N" not in args or "samples" not in args:
        raise ValueError("config needs N and samples")
    return ExperimentPlan(**args)


@dataclass(frozen=True)
class SampleRecord:
    index: int
    k: int
    hulls: tuple  # (d, V, L, W) per kept d


def _sample_chunk(plan: ExperimentPlan, indices) -> list[SampleRecord]:
    out = []
    for i in indices:
        rng = rng_for(plan.seed, i)
        word, inc = tree_from_rng(plan.N, rng, plan.backend)
        qmap = map_from_tree(word, inc, plan.backend)
        k = qmap.k
        hulls = ()
        if plan.bin_of(k) is not None:
            obs = [hull_decompose(qmap, d, plan.backend, plan.prescription) for d in plan.d_for(k)]
            hulls = tuple((o.d, o.hull_volume, o.hull_perimeter, o.complement_volume) for o in obs)
        out.append(SampleRecord(i, k, hulls))
    return out


def _chunk_job(args):
    plan, indices = args
    return _sample_chunk(plan, indices)


def collect_samples(plan: ExperimentPlan) -> list[SampleRecord]:
    """All sample records in index order."""
    chunks = [range(a, min(a + plan.chunk, plan.samples)) for a in range(0, plan.samples, plan.chunk)]
    if plan.workers <= 1:
        records = [r for ch in chunks for r in _sample_chunk(plan, ch)]
    else:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            records = [r for res in pool.map(_chunk_job, [(plan, ch) for ch in chunks]) for r in res]
    records.sort(key=lambda r: r.index)
    return records


@dataclass(frozen=True)
class Estimate:
    bin: str
    observable: str
    mean: float | None
    stderr: float | None
    n: int

    @property
    def missing(self) -> bool:
        return self.n == 0


def _estimate(bin_label, name, values) -> Estimate:
    values = np.asarray(values, dtype=float)
    n = int(values.size)
    if n == 0:
        return Estimate(bin_label, name, None, None, 0)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    return Estimate(bin_label, name, mean, stderr, n)


@lru_cache(maxsize=None)
def _ref_out(k: int, d: int) -> float:
    from ..finite_laws import regime_probabilities
    return float(regime_probabilities(k, d).p_finite)


@lru_cache(maxsize=None)
def _ref_L_out(k: int, d: int) -> float:
    from ..finite_laws import perimeter_expectation
    return float(perimeter_expectation(k, d, "out")) / d**2


def _c_fit(L_values, u_values):
    """Least-squares c with ``E[L | out] = c * g(u)``, the limit law being linear in c."""
    from ..limit_laws import perimeter_expectation_limit
    g = np.array([perimeter_expectation_limit(u, "out", c=1.0) for u in u_values])
    L_values = np.asarray(L_values, float)
    scale = float(np.dot(g, g))
    if scale == 0:
        return np.array([])
    # per-sample contributions whose mean is the fitted c
    return L_values * g * len(g) / scale


@dataclass
class ExperimentResult:
    plan: ExperimentPlan
    records: list
    estimates: list = field(default_factory=list)

    def get(self, observable: str, bin_label: str | None = None) -> Estimate:
        for e in self.estimates:
            if e.observable == observable and (bin_label is None or e.bin == bin_label):
                return e
        raise KeyError(observable)

    def to_csv(self, metadata=()) -> str:
        buf = io.StringIO()
        for line in metadata:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin", "observable", "mean", "stderr", "n"])
        for e in self.estimates:
            w.writerow([e.bin, e.observable,
                        "NA" if e.mean is None else repr(e.mean),
                        "NA" if e.stderr is None else repr(e.stderr), e.n])
        return buf.getvalue()


def summarize(plan: ExperimentPlan, records) -> list[Estimate]:
    estimates = []
    half = plan.N / 2
    for lo, hi in plan.k_bins:
        rows = [(r.k, *h) for r in records if lo <= r.k <= hi for h in r.hulls]
        ds = sorted({row[1] for row in rows}) if plan.d_ratio is None else [None]
        for dsel in ds:
            sel = [row for row in rows if dsel is None or row[1] == dsel]
            dlabel = f"d=round({plan.d_ratio}k)" if dsel is None else f"d={dsel}"
            label = f"k={lo}-{hi};{dlabel};N={plan.N}"
            out = [row for row in sel if row[2] <= half]
            inn = [row for row in sel if row[2] > half]
            series = {
                "out_fraction": [1.0 if row[2] <= half else 0.0 for row in sel],
                "L_out": [row[3] / row[1] ** 2 for row in out],
                "L_all": [row[3] / row[1] ** 2 for row in sel],
                "V_out": [row[2] / row[1] ** 4 for row in out],
                "W_in": [row[4] / row[0] ** 4 for row in inn],
                "ref_out_fraction": [_ref_out(row[0], row[1]) for row in sel],
                "ref_L_out": [_ref_L_out(row[0], row[1]) for row in out],
                "c_fit": _c_fit([row[3] / row[1] ** 2 for row in out], [row[1] / row[0] for row in out]),
            }
            for name in plan.observables:
                estimates.append(_estimate(label, name, series[name]))
        if not rows:
            label = f"k={lo}-{hi};N={plan.N}"
            estimates.extend(Estimate(label, name, None, None, 0) for name in plan.observables)
    return estimates


def run_experiment(plan: ExperimentPlan) -> ExperimentResult:
    records = collect_samples(plan)
    return ExperimentResult(plan, records, summarize(plan, records))


def with_overrides(plan: ExperimentPlan, **kw) -> ExperimentPlan:
    return replace(plan, **{k: v for k, v in kw.items() if v is not None})
