"""Dense state-vector checks of logical gates on small codes."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .codes import CssCode
from .pauli import bits_of, popcount, rref

MAX_QUBITS = 16
TOL = 1e-9

KINDS = {"H", "S", "Sdg", "T", "Tdg", "X", "Z", "CZ", "CCZ", "MCZ", "R", "Rdg"}
_DIAG = {"S": 2, "Sdg": -2, "T": 3, "Tdg": -3}


class DimensionGuardError(ValueError):
    pass


class NotLogical(ValueError):
    def __init__(self, leaked: float):
        super().__init__(f"circuit leaves the codespace (leaked norm {leaked:.3e})")
        self.leaked = leaked


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    level: int = 0  # k for R / Rdg

    def to_json(self):
        d = {"kind": self.kind, "targets": list(self.targets)}
        if self.level:
            d["level"] = self.level
        return d


@dataclass
class GateCircuit:
    n: int
    gates: list = field(default_factory=list)

    def add(self, kind: str, *targets: int, level: int = 0) -> "GateCircuit":
        if kind not in KINDS:
            raise ValueError(f"unknown gate {kind!r}")
        if any(not 0 <= t < self.n for t in targets):
            raise ValueError(f"targets {targets} out of range for n={self.n}")
        arity = {"CZ": 2, "CCZ": 3}.get(kind)
        if arity and len(targets) != arity:
            raise ValueError(f"{kind} needs {arity} targets")
        if kind in ("R", "Rdg") and level < 1:
            raise ValueError("R gates need a level k >= 1")
        self.gates.append(Gate(kind, tuple(targets), level))
        return self

    def __iter__(self):
        return iter(self.gates)

    def to_json(self) -> dict:
        return {"n": self.n, "gates": [g.to_json() for g in self.gates]}

    @classmethod
    def from_json(cls, data) -> "GateCircuit":
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        c = cls(data["n"])
        for g in data["gates"]:
            c.add(g["kind"], *g["targets"], level=g.get("level", 0))
        return c


def r_phase(k: int, dagger: bool = False) -> complex:
    """Phase of R_k = diag(1, exp(2 pi i / 2^k)) on |1>."""
    return np.exp((-1 if dagger else 1) * 2j * np.pi / 2 ** k)


def _bits(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    return (idx[:, None] >> np.arange(n)) & 1


def apply(circuit: GateCircuit, state: np.ndarray) -> np.ndarray:
    """Apply the circuit to a 2^n amplitude vector (qubit q = bit q of the index)."""
    n = circuit.n
    if n > MAX_QUBITS:
        raise DimensionGuardError(f"n={n} exceeds the {MAX_QUBITS}-qubit guard")
    psi = np.array(state, dtype=complex)
    if psi.shape != (1 << n,):
        raise ValueError("state dimension does not match the circuit")
    bits = _bits(n)
    for g in circuit:
        t = list(g.targets)
        if g.kind in ("H", "X"):
            q = t[0]
            psi = psi.reshape([2] * n, order="F")
            if g.kind == "X":
                psi = np.flip(psi, axis=q)
            else:
                a0 = np.take(psi, 0, axis=q)
                a1 = np.take(psi, 1, axis=q)
                psi = np.stack([(a0 + a1), (a0 - a1)], axis=q) / np.sqrt(2)
            psi = psi.reshape(-1, order="F")
            continue
        if g.kind == "Z":
            phase = np.where(bits[:, t[0]] == 1, -1.0, 1.0)
        elif g.kind in _DIAG or g.kind in ("R", "Rdg"):
            k = abs(_DIAG[g.kind]) if g.kind in _DIAG else g.level
            dag = g.kind in ("Sdg", "Tdg", "Rdg")
            phase = np.where(bits[:, t[0]] == 1, r_phase(k, dag), 1.0)
        else:  # CZ, CCZ, MCZ
            allone = np.all(bits[:, t] == 1, axis=1)
            phase = np.where(allone, -1.0, 1.0)
        psi = psi * phase
    return psi


# ---------------------------------------------------------------- codespace


@dataclass(frozen=True)
class CodespaceBasis:
    code: CssCode
    basis_states: np.ndarray  # (2^k, 2^n), row j = |j>_L

    @property
    def projector_rank(self) -> int:
        return self.basis_states.shape[0]


def codespace_basis(code: CssCode) -> CodespaceBasis:
    """|j>_L = Xbar^j sum_{s in <X stabs>} X^s |0...0>, normalized."""
    n = code.n
    if n > MAX_QUBITS:
        raise DimensionGuardError(f"n={n} exceeds the {MAX_QUBITS}-qubit guard")
    gens, _ = rref(code.x_stabs.x_masks())
    group = [0]
    for g in gens:
        group += [s ^ g for s in group]
    group = np.array(group, dtype=np.int64)
    k = code.k
    states = np.zeros((1 << k, 1 << n), dtype=complex)
    for j in range(1 << k):
        shift = 0
        for i in range(k):
            if (j >> i) & 1:
                shift ^= code.logical_x[i].x
        states[j, group ^ shift] = 1.0 / np.sqrt(len(group))
    return CodespaceBasis(code, states)


@dataclass(frozen=True)
class LogicalAction:
    unitary: np.ndarray
    leaked: float


def logical_action(code: CssCode, circuit: GateCircuit, basis: CodespaceBasis | None = None,
                   tol: float = 1e-6) -> LogicalAction:
    """Induced 2^k x 2^k matrix U_ij = <i|C|j>; raises NotLogical if the codespace leaks."""
    basis = codespace_basis(code) if basis is None else basis
    B = basis.basis_states
    out = np.array([apply(circuit, b) for b in B])
    U = B.conj() @ out.T
    resid = out - (U.T @ B)
    leaked = float(np.max(np.linalg.norm(resid, axis=1)))
    if leaked > tol:
        raise NotLogical(leaked)
    return LogicalAction(U, leaked)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = TOL) -> tuple[bool, complex]:
    """Compare matrices up to one global phase, estimated at b's largest entry."""
    i = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[i]) < tol:
        return False, 0j
    phase = a[i] / b[i]
    phase /= abs(phase)
    return bool(np.allclose(a, phase * b, atol=tol, rtol=0)), complex(phase)


def logical_matrix(k: int, circuit: GateCircuit) -> np.ndarray:
    """Dense matrix of a k-qubit circuit."""
    return np.array([apply(circuit, e) for e in np.eye(1 << k)]).T


def mcz_product(k: int, tuples: Sequence[Sequence[int]]) -> GateCircuit:
    c = GateCircuit(k)
    for t in tuples:
        t = tuple(t)
        if len(t) == 1:
            c.add("Z", *t)
        elif len(t) == 2:
            c.add("CZ", *t)
        elif len(t) == 3:
            c.add("CCZ", *t)
        else:
            c.add("MCZ", *t)
    return c


# ---------------------------------------------------------------- ball codes


@dataclass(frozen=True)
class BallContext:
    """A ball code with its colex geometry and the edge label of each logical qubit."""

    colex: object
    ball: object
    code: CssCode
    edges: tuple  # per logical qubit: the ball edge (center, x)
    facets: tuple  # facet index of each local qubit
    side: tuple    # bipartition side (0/1) of each local qubit


def ball_context(colex, center: int, hubs: dict | None = None, order: Sequence | None = None) -> BallContext:
    """Ball code with the canonical X(center, x) basis.

    ``order`` optionally lists leaf vertices x giving the logical-qubit order.
    """
    from .colex import ball, canonical_ball_code, canonical_edges, default_hubs
    from .pauli import PauliOperator

    b = ball(colex, center)
    hubs = default_hubs(colex, b) if hubs is None else hubs
    leaves = [x for _, _, x in canonical_edges(colex, b, hubs)]
    if order is not None:
        if sorted(order) != sorted(leaves):
            raise ValueError("order must list exactly the non-hub boundary vertices")
        leaves = list(order)
    facets = tuple(sorted(b.facet_ids))
    local = {fi: i for i, fi in enumerate(facets)}
    n = len(facets)
    from .colex import ball_code

    lx = [PauliOperator.x_type(n, [local[fi] for fi in colex.facet_star((center, x))]) for x in leaves]
    code = ball_code(colex, b, lx)
    side_all = colex.dual_bipartition()
    return BallContext(colex, b, code, tuple((center, x) for x in leaves), facets,
                       tuple(side_all[fi] for fi in facets))


def r_tilde(ctx: BallContext, kappa: Sequence[int], k: int, flip: bool = False) -> GateCircuit:
    """R_k on St_d(kappa) within T and R_k^dagger on St_d(kappa) within T^c."""
    c = GateCircuit(ctx.code.n)
    star = set(ctx.colex.facet_star(kappa))
    for i, fi in enumerate(ctx.facets):
        if fi in star:
            dag = (ctx.side[i] == 1) != flip
            c.add("Rdg" if dag else "R", i, level=k)
    return c


def predicted_tuples(ctx: BallContext, kappa: Sequence[int], k: int) -> list[tuple[int, ...]]:
    """k-tuples of logical qubits whose edges joined with kappa form a d-simplex."""
    out = []
    for tup in itertools.combinations(range(len(ctx.edges)), k):
        verts = set(kappa).union(*(set(ctx.edges[i]) for i in tup))
        if len(verts) == ctx.colex.d + 1 and ctx.colex.join(tuple(verts)) is not None:
            out.append(tup)
    return out


@dataclass(frozen=True)
class GateReport:
    passed: bool
    tuples: tuple
    phase: complex
    leaked: float
    orientation: int

    def to_json(self) -> dict:
        return {"passed": self.passed, "tuples": [list(t) for t in self.tuples],
                "phase": [self.phase.real, self.phase.imag], "leaked": self.leaked,
                "orientation": self.orientation}


def verify_ckz(ctx: BallContext, kappa: Sequence[int], k: int) -> GateReport:
    """Check R~_k(kappa) against the product of C_k over the join-condition tuples.

    Both bipartition orientations are tried; the report says which one matched.
    """
    tuples = predicted_tuples(ctx, kappa, k)
    target = logical_matrix(ctx.code.k, mcz_product(ctx.code.k, tuples))
    basis = codespace_basis(ctx.code)
    last = None
    for flip in (False, True):
        act = logical_action(ctx.code, r_tilde(ctx, kappa, k, flip), basis)
        ok, phase = equal_up_to_phase(act.unitary, target)
        last = GateReport(ok, tuple(tuples), phase, act.leaked, int(flip))
        if ok:
            return last
    return last


# ---------------------------------------------------------------- morphed codes


def transversal_circuit(morph_result, parent_side: Sequence[int], level: int, flip: bool = False) -> GateCircuit:
    """R_level^{+-1} on surviving parent qubits by bipartition, MCZ on the new qubits."""
    code = morph_result.morphed
    c = GateCircuit(code.n)
    new = []
    for i, (kind, j) in enumerate(morph_result.qubit_map):
        if kind == "parent":
            dag = (parent_side[j] == 1) != flip
            c.add("Rdg" if dag else "R", i, level=level)
        else:
            new.append(i)
    if len(new) == 2:
        c.add("CZ", *new)
    elif len(new) == 3:
        c.add("CCZ", *new)
    elif new:
        c.add("MCZ", *new)
    return c


def check_logical_gate(code: CssCode, circuit: GateCircuit, target: np.ndarray) -> tuple[bool, complex, float]:
    act = logical_action(code, circuit)
    ok, phase = equal_up_to_phase(act.unitary, target)
    return ok, phase, act.leaked


def single_fault_report(code: CssCode, circuit: GateCircuit) -> dict:
    """Insert every nonzero Z^b on the qubits of each gate, after the gate.

    Diagonal circuits commute with Z faults, so each fault is classified by
    its Pauli class: detected, harmless stabilizer, or undetected logical.
    A dense check confirms the class on |+>_L.
    """
    from .codes import pattern_class

    basis = codespace_basis(code)
    plus = basis.basis_states.sum(axis=0) / np.sqrt(basis.projector_rank)
    ideal = apply(circuit, plus)
    P = basis.basis_states
    counts = {"detected": 0, "stabilizer": 0, "logical": 0}
    for g in circuit:
        for r in range(1, len(g.targets) + 1):
            for sub in itertools.combinations(g.targets, r):
                syn, log = pattern_class(code, sub, "Z")
                faulty = GateCircuit(code.n, list(circuit.gates))
                for q in sub:
                    faulty.add("Z", q)
                out = apply(faulty, plus)
                inside = np.linalg.norm(P.conj() @ out)
                if syn:
                    kind = "detected"
                    assert inside < 1e-9
                elif log:
                    kind = "logical"
                else:
                    kind = "stabilizer"
                    assert np.allclose(out, ideal, atol=1e-9)
                counts[kind] += 1
    counts["passed"] = counts["logical"] == 0
    return counts
