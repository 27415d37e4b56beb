"""Command-line entry point: morphqec <command> ..."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np


def _emit(obj, out: str | None, fmt: str = "json") -> None:
    if fmt == "csv" and isinstance(obj, list):
        buf = io.StringIO()
        if obj:
            w = csv.DictWriter(buf, fieldnames=list(obj[0]))
            w.writeheader()
            w.writerows(obj)
        text = buf.getvalue()
    else:
        text = json.dumps(obj, indent=2, default=str) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()]


# ---------------------------------------------------------------- handlers


def cmd_codes(a):
    from .codes import brute_force_distance, build

    code = build(a.name, a.d)
    data = code.to_json()
    if a.distance:
        data["distance"] = brute_force_distance(code)
    _emit(data, a.out)


def cmd_morph(a):
    from .codes import CssCode
    from .morph import MorphSpec, morph

    parent = CssCode.from_json(a.code)
    if a.basis == "canonical":
        spec = MorphSpec.build(parent, _ints(a.region))
    elif a.basis.startswith("random:"):
        spec = MorphSpec.build(parent, _ints(a.region), basis="random", seed=int(a.basis.split(":", 1)[1]))
    else:
        raise SystemExit("--basis must be 'canonical' or 'random:SEED'")
    _emit(morph(spec).to_json(), a.out)


def cmd_lattice(a):
    from .colex import triangular_torus
    from .hct import generate_hct

    lat = generate_hct(triangular_torus(a.L), a.method, a.q, a.seed)
    data = lat.to_json()
    data["summary"] = {"n": lat.n, "k": lat.code.k, "morphed_balls": len(lat.records),
                       "facet_qubits": lat.n_facet_qubits, "cc_edge_qubits": len(lat.cc_edges)}
    _emit(data, a.out)


_TARGETS = {
    "I": np.eye(2), "Z": np.diag([1, -1]), "S": np.diag([1, 1j]), "Sdg": np.diag([1, -1j]),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]), "Tdg": np.diag([1, np.exp(-1j * np.pi / 4)]),
    "CZ": np.diag([1, 1, 1, -1]), "CCZ": np.diag([1] * 7 + [-1]),
}


def cmd_verify(a):
    from .codes import CssCode
    from .gates import GateCircuit, NotLogical, equal_up_to_phase, logical_action

    code = CssCode.from_json(a.code)
    circ = GateCircuit.from_json(a.circuit)
    try:
        act = logical_action(code, circ)
    except NotLogical as e:
        _emit({"logical": False, "leaked": e.leaked}, a.report)
        return 1
    rep = {"logical": True, "leaked": act.leaked,
           "unitary": [[[z.real, z.imag] for z in row] for row in np.round(act.unitary, 12)]}
    status = 0
    if a.expect:
        ok, phase = equal_up_to_phase(act.unitary, _TARGETS[a.expect])
        rep.update({"expect": a.expect, "passed": ok, "phase": [phase.real, phase.imag]})
        status = 0 if ok else 1
    _emit(rep, a.report)
    return status


def cmd_msd_analyze(a):
    from .codes import CssCode
    from .msd import NoiseSpec, analyze, load_branches, protocol_10to1, protocol_15to1

    if a.protocol:
        d = {"10": protocol_10to1, "15": protocol_15to1}[a.protocol]()
        ps, num = d.p_s, d.p_out_num
    else:
        data = json.loads(Path(a.code).read_text())
        code = CssCode.from_json(data)
        if a.t_slots:
            slots, triples = _ints(a.t_slots), [tuple(_ints(t)) for t in (a.ccz or [])]
        elif "qubit_map" in data:
            qm = data["qubit_map"]
            slots = [i for i, e in enumerate(qm) if e[0] == "parent"]
            new = [i for i, e in enumerate(qm) if e[0] == "child"]
            triples = [tuple(new)] if len(new) == 3 else []
        else:
            slots, triples = list(range(code.n)), []
        branches = None
        if a.noise.startswith("file:"):
            branches = load_branches(a.noise[5:])
        elif a.noise != "optimistic":
            raise SystemExit("--noise must be 'optimistic' or 'file:PATH'")
        ps, num = analyze(code, NoiseSpec(tuple(slots), tuple(triples), branches))
    _emit({"p_s": ps.to_json(), "p_out_numerator": num.to_json(),
           "p_out_series": [[i, c.numerator, c.denominator] for i, c in enumerate(num.series_div(ps, a.order))]},
          a.out)


def cmd_msd_cost(a):
    import math

    from .msd import Infeasible, default_protocols, optimize_cost

    protos = default_protocols(a.data)
    names = [s.strip() for s in a.protocols.split(",")]
    missing = [n for n in names if n not in protos]
    if missing:
        raise SystemExit(f"protocol(s) {missing} unavailable; supply a descriptor with --data")
    try:
        r = optimize_cost(a.p, a.target, {n: protos[n] for n in names}, a.max_rounds)
    except Infeasible as e:
        _emit({"feasible": False, "reason": str(e)}, a.out)
        return 1
    _emit({"feasible": True, "sequence": r.label, "cost": r.cost, "p_actual": r.p_actual,
           "neg_log10_p_actual": -math.log10(r.p_actual)}, a.out)


def cmd_decode(a):
    from .decoder import Decoder
    from .hct import HctLattice

    lat = HctLattice.from_json(a.lattice)
    err = json.loads(Path(a.error).read_text())
    err = err["qubits"] if isinstance(err, dict) else err
    dec = Decoder(lat, a.backend)
    corr = dec.decode(dec.syndrome_of(err))
    _emit({"correction": sorted(corr), "success": dec.judge(err, corr)}, a.out)


def cmd_threshold_run(a):
    from .threshold import ExperimentConfig, run, write_csv

    cfg = ExperimentConfig.from_json(a.config)
    rows = run(cfg, a.jobs)
    if a.out:
        write_csv(rows, a.out)
    else:
        _emit(rows, None, "csv")


def cmd_threshold_fit(a):
    from .threshold import fit_threshold, read_csv

    _emit(fit_threshold(read_csv(a.inp), n_boot=a.bootstrap, seed=a.seed).to_json(), a.out)


def cmd_reproduce(a):
    from .scenarios import REGISTRY, run_scenario

    if a.list or not a.name:
        for s in REGISTRY.values():
            print(f"{s.name:16s} {'(slow) ' if s.slow else ''}{s.description}")
        return 0
    kw = {"seed": a.seed, "jobs": a.jobs}
    if a.quick:
        kw.update({"lattices": 4, "trials": 500, "n_decode": 2000, "n_modify": 500, "n_matching": 50})
    if a.data:
        kw["data_file"] = a.data
    anchors = run_scenario(a.name, **kw)
    if a.format == "json":
        _emit([{"name": x.name, "value": x.value, "expected": x.expected, "tol": x.tol,
                "source": x.source, "passed": x.passed} for x in anchors], a.out)
    else:
        text = "\n".join(x.line() for x in anchors) + "\n"
        Path(a.out).write_text(text) if a.out else sys.stdout.write(text)
    return 0 if all(x.passed is not False for x in anchors) else 1


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="morphqec", description="Morphed color codes workbench")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("codes", help="build catalog codes")
    s = p.add_subparsers(dest="action", required=True)
    b = s.add_parser("build")
    b.add_argument("--name", required=True, choices=["steane", "qrm2", "qrm3", "hyperoct", "422"])
    b.add_argument("--d", type=int)
    b.add_argument("--distance", action="store_true", help="include brute-force distance")
    b.add_argument("--out")
    b.set_defaults(func=cmd_codes)

    p = sub.add_parser("morph", help="morph a code on a qubit region")
    p.add_argument("--code", required=True)
    p.add_argument("--region", required=True, help="comma-separated qubit indices")
    p.add_argument("--basis", default="canonical", help="canonical | random:SEED")
    p.add_argument("--out")
    p.set_defaults(func=cmd_morph)

    p = sub.add_parser("lattice", help="generate HCT lattices")
    s = p.add_subparsers(dest="action", required=True)
    b = s.add_parser("build")
    b.add_argument("--L", type=int, required=True)
    b.add_argument("--method", default="A1", choices=["A1", "A2", "B", "C"])
    b.add_argument("--q", type=float, default=0.0)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_lattice)

    p = sub.add_parser("verify", help="dense logical-gate verification")
    s = p.add_subparsers(dest="action", required=True)
    b = s.add_parser("gates")
    b.add_argument("--code", required=True)
    b.add_argument("--circuit", required=True)
    b.add_argument("--expect", choices=sorted(_TARGETS))
    b.add_argument("--report")
    b.set_defaults(func=cmd_verify)

    p = sub.add_parser("msd", help="distillation analysis")
    s = p.add_subparsers(dest="action", required=True)
    b = s.add_parser("analyze")
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--code")
    g.add_argument("--protocol", choices=["10", "15"])
    b.add_argument("--noise", default="optimistic")
    b.add_argument("--t-slots", help="comma-separated T-input qubits")
    b.add_argument("--ccz", action="append", help="comma-separated CCZ triple (repeatable)")
    b.add_argument("--order", type=int, default=4)
    b.add_argument("--out")
    b.set_defaults(func=cmd_msd_analyze)
    b = s.add_parser("cost")
    b.add_argument("--p", type=float, default=0.01)
    b.add_argument("--target", type=float, required=True)
    b.add_argument("--protocols", default="15,10")
    b.add_argument("--max-rounds", type=int, default=5)
    b.add_argument("--data", help="external protocol descriptor JSON (e.g. 10-to-2)")
    b.add_argument("--out")
    b.set_defaults(func=cmd_msd_cost)

    p = sub.add_parser("decode", help="decode one error")
    s = p.add_subparsers(dest="action", required=True)
    b = s.add_parser("one")
    b.add_argument("--lattice", required=True)
    b.add_argument("--error", required=True)
    b.add_argument("--backend", default="pymatching", choices=["pymatching", "networkx"])
    b.add_argument("--out")
    b.set_defaults(func=cmd_decode)

    p = sub.add_parser("threshold", help="Monte Carlo thresholds")
    s = p.add_subparsers(dest="action", required=True)
    b = s.add_parser("run")
    b.add_argument("--config", required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_threshold_run)
    b = s.add_parser("fit")
    b.add_argument("--in", dest="inp", required=True)
    b.add_argument("--bootstrap", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_threshold_fit)

    p = sub.add_parser("reproduce", help="run a named reproduction scenario")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    p.add_argument("--quick", action="store_true", help="reduced statistics")
    p.add_argument("--data", help="external 10-to-2 descriptor for msd-cost")
    p.add_argument("--format", default="text", choices=["text", "json"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return int(rc or 0)


if __name__ == "__main__":
    sys.exit(main())
