import numpy as np
import pytest

from morphqec.threshold import (
    ExperimentConfig,
    FitFailure,
    crossing_estimate,
    fit_threshold,
    lattice_seed,
    read_csv,
    run,
    write_csv,
)


def synthetic_rows(p_th=0.0932, mu=1.42, A=0.2, B=1.5, C=3.0, trials=10 ** 12):
    rows = []
    for L in (12, 18, 24):
        for p in np.linspace(0.085, 0.1, 7):
            x = (p - p_th) * L ** (1 / mu)
            f = A + B * x + C * x * x
            rows.append({"method": "A1", "q": 0.6, "L": L, "p": float(p), "trials": trials,
                         "failures": int(round(f * trials)), "seed": 0})
    return rows


def test_synthetic_collapse_recovered():
    fit = fit_threshold(synthetic_rows())
    assert round(fit.p_th, 4) == 0.0932
    assert round(fit.mu, 4) == 1.42
    assert abs(fit.A - 0.2) < 1e-4 and abs(fit.B - 1.5) < 1e-3


def test_crossing_estimate_synthetic():
    assert abs(crossing_estimate(synthetic_rows()) - 0.0932) < 1e-3


def test_fit_needs_grid():
    rows = [r for r in synthetic_rows() if r["L"] != 24]
    with pytest.raises(FitFailure):
        fit_threshold(rows)


def test_fit_rejects_no_crossing():
    rows = synthetic_rows()
    for r in rows:  # curves ordered the same way at every p: no crossing
        r["failures"] = int(r["trials"] * (0.01 * r["L"] / 24 + r["p"]))
    with pytest.raises(FitFailure):
        crossing_estimate(rows)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(method="Q")
    with pytest.raises(ValueError):
        ExperimentConfig(q=2)
    cfg = ExperimentConfig(L=(6,), p=(0.1,))
    assert ExperimentConfig.from_json(cfg.to_json()) == cfg


def test_seeds_distinct_and_stable():
    cfg = ExperimentConfig()
    seeds = {lattice_seed(cfg, L, li) for L in cfg.L for li in range(5)}
    assert len(seeds) == 15
    assert lattice_seed(cfg, 12, 0) == lattice_seed(ExperimentConfig(), 12, 0)


def small_cfg(**kw):
    base = dict(method="C", q=0.5, L=(6, 12), p=(0.0, 0.05), lattices_per_point=2,
                trials_per_lattice=200, master_seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


def test_run_deterministic_and_p0(tmp_path):
    cfg = small_cfg()
    a, b = run(cfg), run(cfg)
    assert a == b
    assert all(r["failures"] == 0 for r in a if r["p"] == 0)
    path = tmp_path / "rows.csv"
    write_csv(a, path)
    assert read_csv(path) == a


def test_monotone_sanity():
    cfg = small_cfg(L=(12,), p=(0.02, 0.12), lattices_per_point=3, trials_per_lattice=500)
    lo, hi = run(cfg)
    assert lo["failures"] < hi["failures"]
