"""CSS code objects, logical-operator extraction and exhaustive distances."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .pauli import (
    PauliOperator,
    StabilizerMatrix,
    bits_of,
    kernel_basis,
    popcount,
    rref,
    symplectic_product,
)

MAX_ENUMERATION_QUBITS = 20


class CodeValidationError(ValueError):
    pass


class EnumerationGuardError(ValueError):
    """Exhaustive enumeration would exceed the configured size guard."""


@dataclass(frozen=True)
class CssCode:
    n: int
    x_stabs: StabilizerMatrix
    z_stabs: StabilizerMatrix
    logical_x: tuple[PauliOperator, ...]
    logical_z: tuple[PauliOperator, ...]
    label: str = ""
    _ranks: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "logical_x", tuple(self.logical_x))
        object.__setattr__(self, "logical_z", tuple(self.logical_z))

    @classmethod
    def from_supports(cls, n, x_supports, z_supports, label="") -> "CssCode":
        """Build from X/Z check supports; logical operators are extracted."""
        xs = StabilizerMatrix(n, tuple(PauliOperator.x_type(n, s) for s in x_supports))
        zs = StabilizerMatrix(n, tuple(PauliOperator.z_type(n, s) for s in z_supports))
        lx, lz = extract_logicals(xs, zs)
        return cls(n, xs, zs, lx, lz, label)

    @property
    def rank_x(self) -> int:
        if "x" not in self._ranks:
            self._ranks["x"] = len(rref(self.x_stabs.x_masks())[0])
        return self._ranks["x"]

    @property
    def rank_z(self) -> int:
        if "z" not in self._ranks:
            self._ranks["z"] = len(rref(self.z_stabs.z_masks())[0])
        return self._ranks["z"]

    @property
    def k(self) -> int:
        return self.n - self.rank_x - self.rank_z

    @property
    def params(self) -> tuple[int, int]:
        return self.n, self.k

    def validate(self) -> None:
        """Check every CssCode invariant; raises :class:`CodeValidationError`."""
        for r in self.x_stabs:
            if not r.is_x_type:
                raise CodeValidationError("x_stabs contains a non-X row")
        for r in self.z_stabs:
            if not r.is_z_type:
                raise CodeValidationError("z_stabs contains a non-Z row")
        for a in self.x_stabs:
            for b in self.z_stabs:
                if symplectic_product(a, b):
                    raise CodeValidationError("X and Z checks do not commute")
        k = self.k
        if len(self.logical_x) != k or len(self.logical_z) != k:
            raise CodeValidationError(
                f"expected {k} logical pairs, got {len(self.logical_x)}/{len(self.logical_z)}"
            )
        for i, lx in enumerate(self.logical_x):
            for j, lz in enumerate(self.logical_z):
                if symplectic_product(lx, lz) != (i == j):
                    raise CodeValidationError(f"logical pairing fails at ({i}, {j})")
        for lop in self.logical_x + self.logical_z:
            for s in self.x_stabs.rows + self.z_stabs.rows:
                if symplectic_product(lop, s):
                    raise CodeValidationError("a logical operator anticommutes with a check")

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "n": self.n,
            "x_stabs": [r.to_string() for r in self.x_stabs],
            "z_stabs": [r.to_string() for r in self.z_stabs],
            "logical_x": [r.to_string() for r in self.logical_x],
            "logical_z": [r.to_string() for r in self.logical_z],
        }

    @classmethod
    def from_json(cls, data) -> "CssCode":
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        n = data["n"]
        parse = lambda rows: tuple(PauliOperator.from_string(s) for s in rows)  # noqa: E731
        return cls(
            n,
            StabilizerMatrix(n, parse(data["x_stabs"])),
            StabilizerMatrix(n, parse(data["z_stabs"])),
            parse(data.get("logical_x", [])),
            parse(data.get("logical_z", [])),
            data.get("label", ""),
        )


def _reps_mod(candidates: Sequence[int], stab_rows: Sequence[int]) -> list[int]:
    """Candidates independent modulo the stabilizer row space, in order."""
    rows, pivots = rref(list(stab_rows))
    chosen = []
    for v in candidates:
        w = v
        for r, p in zip(rows, pivots):
            if (w >> p) & 1:
                w ^= r
        if not w:
            continue
        p = (w & -w).bit_length() - 1
        for i, r in enumerate(rows):
            if (r >> p) & 1:
                rows[i] = r ^ w
        rows.append(w)
        pivots.append(p)
        chosen.append(v)
    return chosen


def _gf2_inverse(m: list[list[int]]) -> list[list[int]]:
    k = len(m)
    a = [row[:] + [int(i == j) for j in range(k)] for i, row in enumerate(m)]
    for col in range(k):
        piv = next((r for r in range(col, k) if a[r][col]), None)
        if piv is None:
            raise CodeValidationError("logical pairing matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        for r in range(k):
            if r != col and a[r][col]:
                a[r] = [u ^ v for u, v in zip(a[r], a[col])]
    return [row[k:] for row in a]


def pair_logicals(
    x_stabs: StabilizerMatrix, z_stabs: StabilizerMatrix, logical_x: Sequence[PauliOperator]
) -> tuple[PauliOperator, ...]:
    """Z-type logicals dual to the given X-type logicals (pairing = identity)."""
    n = x_stabs.n
    z_candidates = kernel_basis(x_stabs.x_masks(), n)
    z_reps = _reps_mod(z_candidates, z_stabs.z_masks())
    k = len(z_reps)
    if len(logical_x) != k:
        raise CodeValidationError(f"expected {k} logical X operators, got {len(logical_x)}")
    m = [[popcount(lx.x & z) & 1 for z in z_reps] for lx in logical_x]
    inv = _gf2_inverse(m)
    out = []
    for j in range(k):
        v = 0
        for l in range(k):
            if inv[l][j]:
                v ^= z_reps[l]
        out.append(PauliOperator(n, 0, v))
    return tuple(out)


def extract_logicals(
    x_stabs: StabilizerMatrix, z_stabs: StabilizerMatrix
) -> tuple[tuple[PauliOperator, ...], tuple[PauliOperator, ...]]:
    """Symplectically paired logical X/Z generators of a CSS code.

    X representatives are the kernel vectors of the Z checks (taken in RREF
    free-column order) that are independent modulo the X checks; the Z
    operators are then fixed by the pairing.
    """
    n = x_stabs.n
    if z_stabs.n != n:
        raise CodeValidationError("X and Z checks act on different qubit counts")
    for a in x_stabs:
        for b in z_stabs:
            if popcount(a.x & b.z) & 1:
                raise CodeValidationError("X and Z checks do not commute")
    x_candidates = kernel_basis(z_stabs.z_masks(), n)
    x_reps = _reps_mod(x_candidates, x_stabs.x_masks())
    lx = tuple(PauliOperator(n, v, 0) for v in x_reps)
    lz = pair_logicals(x_stabs, z_stabs, lx)
    return lx, lz


def _column_masks(row_masks: Sequence[int], n: int) -> np.ndarray:
    cols = np.zeros(n, dtype=np.uint64)
    for r, mask in enumerate(row_masks):
        for q in bits_of(mask):
            cols[q] |= np.uint64(1 << r)
    return cols


def sector_histogram(code: CssCode, sector: str = "Z", qubits: Sequence[int] | None = None,
                     syndrome0: int = 0, logical0: int = 0) -> np.ndarray:
    """Weight/status histogram of all Z-type (or X-type) patterns.

    Enumerates every subset of ``qubits`` (default: all qubits). Row ``w``
    counts weight-``w`` patterns by status: detected, stabilizer, logical.
    ``syndrome0``/``logical0`` shift the enumeration by a fixed pattern.
    """
    if sector == "Z":
        checks, logicals = code.x_stabs.x_masks(), [op.x for op in code.logical_x]
    elif sector == "X":
        checks, logicals = code.z_stabs.z_masks(), [op.z for op in code.logical_z]
    else:
        raise ValueError("sector must be 'X' or 'Z'")
    checks, _ = rref(checks)
    if len(checks) > 64 or len(logicals) > 64:
        raise EnumerationGuardError("more than 64 checks or logicals")
    syn_cols = _column_masks(checks, code.n)
    log_cols = _column_masks(logicals, code.n)
    if qubits is not None:
        syn_cols = syn_cols[list(qubits)]
        log_cols = log_cols[list(qubits)]
    return kernels.weight_histogram(syn_cols, log_cols, syndrome0, logical0)


def pattern_class(code: CssCode, qubits: Sequence[int], sector: str = "Z") -> tuple[int, int]:
    """(syndrome word, logical word) of a fixed pattern, in sector_histogram's encoding."""
    if sector == "Z":
        checks, logicals = code.x_stabs.x_masks(), [op.x for op in code.logical_x]
    else:
        checks, logicals = code.z_stabs.z_masks(), [op.z for op in code.logical_z]
    checks, _ = rref(checks)
    m = 0
    for q in qubits:
        m ^= 1 << q
    syn = sum(1 << r for r, c in enumerate(checks) if popcount(c & m) & 1)
    log = sum(1 << r for r, c in enumerate(logicals) if popcount(c & m) & 1)
    return syn, log


def _guard(code: CssCode, limit: int = MAX_ENUMERATION_QUBITS):
    if code.n > limit:
        raise EnumerationGuardError(
            f"n={code.n} exceeds the exhaustive-enumeration guard of {limit} qubits"
        )


def brute_force_distance(code: CssCode, limit: int = MAX_ENUMERATION_QUBITS) -> int:
    """Minimum weight of a nontrivial logical, over both sectors, by enumeration."""
    _guard(code, limit)
    if code.k == 0:
        raise ValueError("code encodes no logical qubits")
    best = None
    for sector in ("Z", "X"):
        hist = sector_histogram(code, sector)
        weights = np.nonzero(hist[:, 2])[0]
        if len(weights):
            w = int(weights[0])
            best = w if best is None else min(best, w)
    return best


def count_weight2_logical_z(code: CssCode, limit: int = MAX_ENUMERATION_QUBITS) -> int:
    """Number of weight-2 Z operators that are logical but not stabilizers."""
    _guard(code, limit)
    return int(sector_histogram(code, "Z")[2, 2])


# ---------------------------------------------------------------- catalog


def four_two_two() -> CssCode:
    return CssCode.from_supports(4, [range(4)], [range(4)], label="[[4,2,2]]")


def trivial_code(n: int = 1) -> CssCode:
    return CssCode.from_supports(n, [], [], label=f"trivial-{n}")


def qrm(d: int) -> CssCode:
    """Distance-three quantum Reed-Muller code, [[2^(d+1)-1, 1, 3]]."""
    from .colex import color_code, qrm_colex

    if d not in (2, 3):
        raise ValueError(f"qrm supports d in {{2, 3}}, got {d}")
    code = color_code(qrm_colex(d))
    return _relabel(code, f"QRM({d})")


def steane() -> CssCode:
    return _relabel(qrm(2), "Steane")


def hyperoctahedron(d: int) -> CssCode:
    """Ball code of the d-hyperoctahedron, [[2^d, d, 2]]."""
    from .colex import ball, ball_code, hyperoctahedron_colex

    if not 2 <= d <= 6:
        raise ValueError(f"hyperoctahedron supports 2 <= d <= 6, got {d}")
    cx = hyperoctahedron_colex(d)
    return _relabel(ball_code(cx, ball(cx, 0)), f"hyperoctahedron({d})")


def _relabel(code: CssCode, label: str) -> CssCode:
    return CssCode(code.n, code.x_stabs, code.z_stabs, code.logical_x, code.logical_z, label)


CATALOG = {
    "steane": steane,
    "qrm2": lambda: qrm(2),
    "qrm3": lambda: qrm(3),
    "422": four_two_two,
}


def build(name: str, d: int | None = None) -> CssCode:
    if name == "hyperoct":
        return hyperoctahedron(3 if d is None else d)
    if name == "qrm" and d is not None:
        return qrm(d)
    try:
        return CATALOG[name]()
    except KeyError:
        raise ValueError(f"unknown code {name!r}") from None
