"""Randomized decoder property checks shared by the test-suite and the CLI."""
from __future__ import annotations

import numpy as np

from .colex import triangular_torus
from .decoder import PAIRS, Decoder, exhaustive_pairing_weight
from .hct import generate_hct
from .scenarios import Anchor

QS = (0.0, 0.3, 0.6, 1.0)


def _decoders(Ls, methods, seed, backend="pymatching"):
    out = []
    for L in Ls:
        cx = triangular_torus(L)
        for m in methods:
            for qi, q in enumerate(QS):
                out.append(Decoder(generate_hct(cx, m, q, seed * 1000 + qi), backend))
    return out


def matching_optimality(n: int = 200, seed: int = 0) -> Anchor:
    """Both MWPM backends reach the exhaustive-pairing optimum (<= 10 defects)."""
    rng = np.random.default_rng(seed)
    decs = _decoders((6,), ("A1", "B", "C"), seed)
    nx_decs = [Decoder(d.lattice, "networkx") for d in decs]
    bad = checked = 0
    while checked < n:
        i = int(rng.integers(len(decs)))
        d, dn = decs[i], nx_decs[i]
        err = np.nonzero(rng.random(d.lattice.n) < rng.uniform(0.02, 0.12))[0]
        syn = d.syndrome_of(err.tolist())
        for pair in PAIRS:
            defects = d.restricted_syndrome(syn, pair)
            if not 0 < len(defects) <= 10:
                continue
            dist = {v: d._bfs(d.restricted[pair], v)[0] for v in defects}
            oracle = exhaustive_pairing_weight(defects, lambda a, b: dist[a][b])
            for dec in (d, dn):
                w = sum(dist[a][b] for a, b in dec.match_pairs(syn, pair))
                m = dec.match(syn, pair)
                bad += (w != oracle) or (m.boundary(dec.restricted[pair]) != set(defects))
            checked += 1
    return Anchor(f"matching optimality ({checked} syndromes, 2 backends)", bad, 0, 0, "exhaustive oracle", bad == 0)


def local_modify_preservation(n: int = 10_000, seed: int = 0) -> Anchor:
    """local_modify keeps the matching boundary (asserted per call); counts real rewrites."""
    rng = np.random.default_rng(seed + 1)
    decs = _decoders((6, 12), ("B", "C"), seed)
    rewrites = bad = 0
    for t in range(n):
        d = decs[t % len(decs)]
        err = np.nonzero(rng.random(d.lattice.n) < rng.uniform(0.02, 0.15))[0]
        syn = d.syndrome_of(err.tolist())
        for pair in PAIRS:
            m = d.match(syn, pair)
            rl = d.restricted[pair]
            mm = d.local_modify(m)
            bad += mm.boundary(rl) != m.boundary(rl)
            rewrites += mm.edges != m.edges
    return Anchor(f"local_modify boundary preserved ({n} instances, {rewrites} with rewrites)", bad, 0, 0,
                  "boundary invariance", bad == 0 and rewrites > 0)


def decode_consistency(n: int = 100_000, seed: int = 0) -> Anchor:
    """decode never raises and syndrome(correction) equals the syndrome."""
    rng = np.random.default_rng(seed + 2)
    decs = _decoders((6, 12), ("A1", "A2", "B", "C"), seed)
    bad = 0
    for t in range(n):
        d = decs[t % len(decs)]
        err = np.nonzero(rng.random(d.lattice.n) < rng.uniform(0.0, 0.15))[0].tolist()
        syn = d.syndrome_of(err)
        try:
            corr = d.decode(syn)
            bad += d.syndrome_of(corr) != syn
        except Exception:  # noqa: BLE001 - any raise counts as a violation
            bad += 1
    return Anchor(f"decode syndrome consistency ({n} instances)", bad, 0, 0, "decode contract", bad == 0)


def single_error_success(seed: int = 0, seeds: int = 100) -> Anchor:
    """Every single-qubit error is corrected, for L=12, all q and methods, many seeds."""
    bad = total = 0
    cx = triangular_torus(12)
    for s in range(seeds):
        for m in ("A1", "A2", "B", "C"):
            q = QS[s % len(QS)]
            d = Decoder(generate_hct(cx, m, q, seed * 7919 + s))
            for qb in range(d.lattice.n):
                total += 1
                bad += not d.judge([qb], d.decode(d.syndrome_of([qb])))
    return Anchor(f"single-qubit errors corrected ({total} cases)", bad, 0, 0, "decoder", bad == 0)
