"""Monte Carlo logical failure rates and finite-size-scaling threshold fits."""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .colex import triangular_torus
from .decoder import Decoder
from .hct import METHODS, generate_hct

CSV_FIELDS = ("method", "q", "L", "p", "trials", "failures", "seed")


class FitFailure(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    method: str = "A1"
    q: float = 0.0
    L: tuple[int, ...] = (12, 18, 24)
    p: tuple[float, ...] = (0.07, 0.08, 0.09, 0.1, 0.11)
    lattices_per_point: int = 20
    trials_per_lattice: int = 2000
    master_seed: int = 0
    backend: str = "pymatching"

    def __post_init__(self):
        object.__setattr__(self, "L", tuple(int(x) for x in self.L))
        object.__setattr__(self, "p", tuple(float(x) for x in self.p))
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if not 0 <= self.q <= 1:
            raise ValueError("q must lie in [0, 1]")
        if not self.L or not self.p:
            raise ValueError("L and p grids must be nonempty")

    @classmethod
    def from_json(cls, data) -> "ExperimentConfig":
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        return cls(**data)

    def to_json(self) -> dict:
        d = asdict(self)
        d["L"], d["p"] = list(self.L), list(self.p)
        return d


def _method_index(method: str) -> int:
    return METHODS.index(method)


def lattice_seed(cfg: ExperimentConfig, L: int, li: int) -> int:
    ss = np.random.SeedSequence([cfg.master_seed, _method_index(cfg.method),
                                 int(round(cfg.q * 10 ** 6)), L, li])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def trial_rng(cfg: ExperimentConfig, L: int, li: int, pi: int) -> np.random.Generator:
    ss = np.random.SeedSequence([cfg.master_seed, _method_index(cfg.method),
                                 int(round(cfg.q * 10 ** 6)), L, li, pi, 1])
    return np.random.default_rng(ss)


def _run_lattice(args):
    cfg, L, li = args
    lat = generate_hct(triangular_torus(L), cfg.method, cfg.q, lattice_seed(cfg, L, li))
    dec = Decoder(lat, cfg.backend)
    return [dec.sample_failures(p, cfg.trials_per_lattice, trial_rng(cfg, L, li, pi))
            for pi, p in enumerate(cfg.p)]


def run(cfg: ExperimentConfig, jobs: int = 1) -> list[dict]:
    """Rows (method, q, L, p, trials, failures, seed), aggregated over lattices."""
    tasks = [(cfg, L, li) for L in cfg.L for li in range(cfg.lattices_per_point)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_run_lattice, tasks))
    else:
        results = [_run_lattice(t) for t in tasks]
    fails = {}
    for (c, L, li), res in zip(tasks, results):
        for pi, f in enumerate(res):
            fails[(L, pi)] = fails.get((L, pi), 0) + f
    rows = []
    for L in cfg.L:
        for pi, p in enumerate(cfg.p):
            rows.append({"method": cfg.method, "q": cfg.q, "L": L, "p": p,
                         "trials": cfg.lattices_per_point * cfg.trials_per_lattice,
                         "failures": fails[(L, pi)], "seed": cfg.master_seed})
    return rows


def write_csv(rows: Sequence[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        w.writeheader()
        for r in rows:
            w.writerow({k: r[k] for k in CSV_FIELDS})


def read_csv(path) -> list[dict]:
    with open(path) as fh:
        out = []
        for r in csv.DictReader(fh):
            out.append({"method": r["method"], "q": float(r["q"]), "L": int(r["L"]), "p": float(r["p"]),
                        "trials": int(r["trials"]), "failures": int(r["failures"]), "seed": int(r["seed"])})
        return out


# ---------------------------------------------------------------- fitting


@dataclass(frozen=True)
class FssFit:
    p_th: float
    mu: float
    A: float
    B: float
    C: float
    residual: float
    dof: int
    p_th_err: float = float("nan")

    def to_json(self) -> dict:
        return asdict(self)


def _arrays(rows):
    p = np.array([r["p"] for r in rows], dtype=float)
    L = np.array([r["L"] for r in rows], dtype=float)
    n = np.array([r["trials"] for r in rows], dtype=float)
    f = np.array([r["failures"] for r in rows], dtype=float) / n
    # binomial standard error, floored so that f = 0 or 1 points keep finite weight
    sig = np.sqrt(np.maximum(f * (1 - f), 1.0 / n) / n)
    return p, L, f, sig


def _quad_fit(x, f, w):
    V = np.stack([np.ones_like(x), x, x * x], axis=1) * w[:, None]
    coef, *_ = np.linalg.lstsq(V, f * w, rcond=None)
    r = (V @ coef - f * w)
    return coef, float(r @ r)


def _objective(theta, p, L, f, w):
    p_th, mu = theta
    x = (p - p_th) * L ** (1.0 / mu)
    return _quad_fit(x, f, w)[1]


def fit_threshold(rows: Sequence[dict], mu_range=(1.0, 2.0), grid: int = 41, n_boot: int = 0,
                  seed: int = 0) -> FssFit:
    """Weighted least squares of f against A + Bx + Cx^2, x = (p - p_th) L^(1/mu)."""
    p, L, f, sig = _arrays(rows)
    if len(set(L)) < 3 or len(set(p)) < 5:
        raise FitFailure("need at least 3 sizes and 5 error rates")
    return _fit(p, L, f, sig, mu_range, grid, n_boot, seed)


def _fit(p, L, f, sig, mu_range, grid, n_boot, seed):
    w = 1.0 / sig
    lo, hi = float(p.min()), float(p.max())
    best = None
    for pt in np.linspace(lo, hi, grid):
        for mu in np.linspace(mu_range[0], mu_range[1], 11):
            r = _objective((pt, mu), p, L, f, w)
            if best is None or r < best[0]:
                best = (r, pt, mu)
    bounds = [(lo, hi), mu_range]
    res = minimize(_objective, x0=[best[1], best[2]], args=(p, L, f, w), method="Nelder-Mead",
                   bounds=bounds, options={"xatol": 1e-7, "fatol": 1e-10, "maxiter": 4000})
    p_th, mu = (float(v) for v in res.x)
    if res.fun > best[0]:
        p_th, mu = best[1], best[2]
    x = (p - p_th) * L ** (1.0 / mu)
    coef, resid = _quad_fit(x, f, w)
    edge = 0.02 * (hi - lo)
    if not lo + edge < p_th < hi - edge:
        raise FitFailure(f"fitted threshold {p_th:.4f} lies at the edge of the scanned range")
    err = float("nan")
    if n_boot:
        rng = np.random.default_rng(seed)
        n = np.round(f * (1 - f) / sig ** 2).clip(1)
        ths = []
        for _ in range(n_boot):
            fb = rng.binomial(n.astype(np.int64), f) / n
            sb = np.sqrt(np.maximum(fb * (1 - fb), 1.0 / n) / n)
            try:
                ths.append(_fit(p, L, fb, sb, mu_range, 21, 0, 0).p_th)
            except FitFailure:
                pass
        if len(ths) > 1:
            err = float(np.std(ths, ddof=1))
    return FssFit(p_th, mu, float(coef[0]), float(coef[1]), float(coef[2]), resid, len(p) - 5, err)


def crossing_estimate(rows: Sequence[dict]) -> float:
    """Mean p where consecutive-size failure curves cross (linear interpolation)."""
    by_L = {}
    for r in rows:
        by_L.setdefault(r["L"], []).append((r["p"], r["failures"] / r["trials"]))
    Ls = sorted(by_L)
    xs = []
    for a, b in zip(Ls, Ls[1:]):
        pa, fa = map(np.array, zip(*sorted(by_L[a])))
        _, fb = map(np.array, zip(*sorted(by_L[b])))
        d = fb - fa
        for i in range(len(d) - 1):
            if d[i] < 0 <= d[i + 1]:
                xs.append(pa[i] - d[i] * (pa[i + 1] - pa[i]) / (d[i + 1] - d[i]))
                break
    if not xs:
        raise FitFailure("no crossing found")
    return float(np.mean(xs))


def two_stage(method: str, q: float, L=(12, 18, 24), coarse_p=(0.07, 0.08, 0.09, 0.1, 0.11, 0.12),
              half_width: float = 0.015, points: int = 7, coarse_lattices: int = 4,
              coarse_trials: int = 500, lattices: int = 20, trials: int = 2000,
              master_seed: int = 0, jobs: int = 1):
    """Coarse scan to locate the crossing, then a fine scan centred on it.

    Returns (fine rows, fit, coarse crossing).
    """
    coarse = ExperimentConfig(method, q, L, coarse_p, coarse_lattices, coarse_trials, master_seed + 7919)
    center = crossing_estimate(run(coarse, jobs))
    grid = tuple(np.round(np.linspace(center - half_width, center + half_width, points), 5))
    fine = ExperimentConfig(method, q, L, grid, lattices, trials, master_seed)
    rows = run(fine, jobs)
    return rows, fit_threshold(rows, n_boot=20, seed=master_seed), center
