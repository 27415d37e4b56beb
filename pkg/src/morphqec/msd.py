"""Exact distillation analysis under diagonal Z noise, and multi-round cost search."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .codes import CssCode, pattern_class, sector_histogram

MAX_BRANCHES = 1 << 24


class EnumerationGuardError(ValueError):
    pass


class Infeasible(ValueError):
    pass


@dataclass(frozen=True)
class ErrorPolynomial:
    """Exact polynomial in p with rational coefficients (index = power)."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        c = [Fraction(x) for x in self.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c or [Fraction(0)]))

    @classmethod
    def const(cls, v) -> "ErrorPolynomial":
        return cls((Fraction(v),))

    @classmethod
    def p(cls) -> "ErrorPolynomial":
        return cls((Fraction(0), Fraction(1)))

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return ErrorPolynomial(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return ErrorPolynomial(tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return ErrorPolynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = ErrorPolynomial.const(1)
        for _ in range(k):
            out = out * self
        return out

    def coefficient(self, power: int) -> Fraction:
        return self.coeffs[power] if power < len(self.coeffs) else Fraction(0)

    def truncate(self, order: int) -> tuple[Fraction, ...]:
        return tuple(self.coefficient(i) for i in range(order + 1))

    def series_div(self, other: "ErrorPolynomial", order: int) -> tuple[Fraction, ...]:
        """Power-series coefficients of self/other up to p^order (other(0) != 0)."""
        b0 = other.coefficient(0)
        if b0 == 0:
            raise ZeroDivisionError("series division needs a nonzero constant term")
        out = []
        for i in range(order + 1):
            acc = self.coefficient(i) - sum(out[j] * other.coefficient(i - j) for j in range(i))
            out.append(acc / b0)
        return tuple(out)

    def leading(self) -> tuple[int, Fraction]:
        for i, c in enumerate(self.coeffs):
            if c:
                return i, c
        return 0, Fraction(0)

    def __call__(self, p):
        if isinstance(p, Fraction):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * p + c
            return acc
        return np.polynomial.polynomial.polyval(p, [float(c) for c in self.coeffs])

    def to_json(self) -> list:
        return [[i, c.numerator, c.denominator] for i, c in enumerate(self.coeffs) if c]

    @classmethod
    def from_json(cls, rows) -> "ErrorPolynomial":
        n = max((r[0] for r in rows), default=0) + 1
        c = [Fraction(0)] * n
        for r in rows:
            c[r[0]] += Fraction(r[1], r[2] if len(r) > 2 else 1)
        return cls(tuple(c))


def _as_poly(x) -> ErrorPolynomial:
    return x if isinstance(x, ErrorPolynomial) else ErrorPolynomial.const(x)


@dataclass(frozen=True)
class NoiseSpec:
    """Z-noise on magic-state inputs.

    ``t_slots`` get independent Z with probability p. Each CCZ triple gets
    Z^b with branch weight ``branches[b]`` (bit i of b acts on the i-th qubit).
    """

    t_slots: tuple[int, ...]
    ccz_triples: tuple[tuple[int, int, int], ...] = ()
    branches: tuple[ErrorPolynomial, ...] | None = None

    def branch_weights(self) -> tuple[ErrorPolynomial, ...]:
        if self.branches is not None:
            return self.branches
        return optimistic_branches()

    def validate(self) -> None:
        total = sum(self.branch_weights(), ErrorPolynomial.const(0))
        if self.ccz_triples and total != ErrorPolynomial.const(1):
            raise ValueError("CCZ branch weights must sum to 1")


def optimistic_branches() -> tuple[ErrorPolynomial, ...]:
    """(1-p) on b=0 and p/7 on each nonzero pattern."""
    p = ErrorPolynomial.p()
    return tuple([1 - p] + [p * Fraction(1, 7)] * 7)


def zero_branches() -> tuple[ErrorPolynomial, ...]:
    return tuple([ErrorPolynomial.const(1)] + [ErrorPolynomial.const(0)] * 7)


def load_branches(path) -> tuple[ErrorPolynomial, ...]:
    """CCZ branch distribution from JSON: {"branches": [poly rows for b=0..7]}."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"CCZ branch distribution file not found: {path}")
    data = json.loads(path.read_text())
    br = tuple(ErrorPolynomial.from_json(rows) for rows in data["branches"])
    if len(br) != 8:
        raise ValueError("expected 8 branch polynomials")
    return br


def analyze(code: CssCode, noise: NoiseSpec) -> tuple[ErrorPolynomial, ErrorPolynomial]:
    """Exact (p_s, p_out numerator) for trivial-syndrome postselection.

    p_s is the probability of a trivial X syndrome; the numerator is the
    probability of a trivial syndrome together with a nontrivial logical
    Z. The conditional output error is numerator / p_s.
    """
    noise.validate()
    m = len(noise.t_slots)
    branches = 2 ** m * 8 ** len(noise.ccz_triples)
    if branches > MAX_BRANCHES:
        raise EnumerationGuardError(f"{branches} branches exceed the guard of {MAX_BRANCHES}")
    p = ErrorPolynomial.p()
    weights = noise.branch_weights()
    binom = [p ** w * (1 - p) ** (m - w) for w in range(m + 1)]
    ps = ErrorPolynomial.const(0)
    num = ErrorPolynomial.const(0)
    for combo in itertools.product(range(8), repeat=len(noise.ccz_triples)):
        factor = ErrorPolynomial.const(1)
        flipped = []
        for b, tri in zip(combo, noise.ccz_triples):
            factor = factor * weights[b]
            flipped += [tri[i] for i in range(3) if (b >> i) & 1]
        if factor == ErrorPolynomial.const(0):
            continue
        syn0, log0 = pattern_class(code, flipped)
        hist = sector_histogram(code, "Z", noise.t_slots, syn0, log0)
        ok = ErrorPolynomial.const(0)
        bad = ErrorPolynomial.const(0)
        for w in range(m + 1):
            if hist[w, 1] or hist[w, 2]:
                ok = ok + int(hist[w, 1] + hist[w, 2]) * binom[w]
            if hist[w, 2]:
                bad = bad + int(hist[w, 2]) * binom[w]
        ps = ps + factor * ok
        num = num + factor * bad
    return ps, num


def pessimistic_ccz(code: CssCode, t_slots, ccz_triples, distribution) -> tuple[ErrorPolynomial, ErrorPolynomial]:
    """analyze() with an externally supplied CCZ branch distribution (path or tuple)."""
    if isinstance(distribution, (str, Path)):
        distribution = load_branches(distribution)
    if distribution is None:
        raise FileNotFoundError("a CCZ branch distribution is required")
    return analyze(code, NoiseSpec(tuple(t_slots), tuple(ccz_triples), tuple(distribution)))


# ---------------------------------------------------------------- protocols


@dataclass(frozen=True)
class ProtocolDescriptor:
    name: str
    inputs: int
    outputs: int
    p_s: ErrorPolynomial
    p_out_num: ErrorPolynomial
    provenance: str = "derived"

    def success(self, p: float) -> float:
        return float(self.p_s(p))

    def output_error(self, p: float) -> float:
        """Per-output error conditioned on success."""
        return float(self.p_out_num(p)) / float(self.p_s(p))

    def to_json(self) -> dict:
        return {"name": self.name, "inputs": self.inputs, "outputs": self.outputs,
                "p_s": self.p_s.to_json(), "p_out": self.p_out_num.to_json(),
                "provenance": self.provenance}

    @classmethod
    def from_json(cls, data) -> "ProtocolDescriptor":
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        return cls(data["name"], data["inputs"], data["outputs"],
                   ErrorPolynomial.from_json(data["p_s"]), ErrorPolynomial.from_json(data["p_out"]),
                   data.get("provenance", "external"))


def morphed_qrm3():
    """The [[10,1,2]] code with its simplex qubits and new (edge) qubits."""
    from .colex import ball, canonical_ball_code, color_code, qrm_colex
    from .morph import MorphSpec, morph

    cx = qrm_colex(3)
    b = ball(cx, 4)
    cc, _ = canonical_ball_code(cx, b)
    res = morph(MorphSpec.build(color_code(cx), b.facet_ids, cc.logical_x))
    simplex = tuple(i for i, (kind, _) in enumerate(res.qubit_map) if kind == "parent")
    edge = tuple(i for i, (kind, _) in enumerate(res.qubit_map) if kind == "child")
    return res, simplex, edge


def protocol_10to1(branches=None) -> ProtocolDescriptor:
    res, simplex, edge = morphed_qrm3()
    ps, num = analyze(res.morphed, NoiseSpec(simplex, (edge,), branches))
    return ProtocolDescriptor("10", len(simplex) + 1, 1, ps, num)


def protocol_15to1() -> ProtocolDescriptor:
    from .codes import qrm

    code = qrm(3)
    ps, num = analyze(code, NoiseSpec(tuple(range(code.n))))
    return ProtocolDescriptor("15", code.n, 1, ps, num)


def default_protocols(data_file=None) -> dict[str, ProtocolDescriptor]:
    out = {"15": protocol_15to1(), "10": protocol_10to1()}
    if data_file is not None:
        d = ProtocolDescriptor.from_json(data_file)
        out[d.name] = d
    return out


def crossover(a: ProtocolDescriptor, b: ProtocolDescriptor, lo=1e-4, hi=0.2, grid=20001) -> float:
    """Smallest p on a grid where a's output error is at most b's."""
    ps = np.linspace(lo, hi, grid)
    ea = a.p_out_num(ps) / a.p_s(ps)
    eb = b.p_out_num(ps) / b.p_s(ps)
    idx = np.nonzero(ea <= eb)[0]
    if not len(idx):
        raise ValueError("no crossover in range")
    return float(ps[idx[0]])


@dataclass(frozen=True)
class CostResult:
    sequence: tuple[str, ...]
    cost: float
    p_actual: float

    @property
    def label(self) -> str:
        return "-".join(self.sequence)


def sequence_cost(p_in: float, seq: Sequence[ProtocolDescriptor]) -> tuple[float, float]:
    cost, p = 1.0, p_in
    for proto in seq:
        cost *= proto.inputs / (proto.outputs * proto.success(p))
        p = proto.output_error(p)
    return cost, p


def optimize_cost(p_in: float, p_targ: float, protocols, max_rounds: int = 5) -> CostResult:
    """Cheapest protocol sequence (up to ``max_rounds``) with output error <= p_targ."""
    if not protocols:
        raise ValueError("no protocols given")
    if not 1 <= max_rounds <= 6:
        raise ValueError("max_rounds must be between 1 and 6")
    protos = list(protocols.values()) if isinstance(protocols, dict) else list(protocols)
    best = None
    for r in range(1, max_rounds + 1):
        for seq in itertools.product(protos, repeat=r):
            cost, p = sequence_cost(p_in, seq)
            if p <= p_targ and (best is None or cost < best.cost - 1e-12):
                best = CostResult(tuple(s.name for s in seq), cost, p)
    if best is None:
        raise Infeasible(f"no sequence of at most {max_rounds} rounds reaches {p_targ:g}")
    return best
