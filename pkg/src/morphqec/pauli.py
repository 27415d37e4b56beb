"""Exact GF(2) symplectic algebra for phase-free Pauli operators.

Operators are stored as two Python integers used as packed bit vectors:
bit ``i`` of ``x`` (``z``) is set when the operator has an X (Z) component
on qubit ``i``. Phases are never tracked; every code handled by this
package is CSS with all-plus generators.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


class NotInSpan(ValueError):
    """The target operator is not a GF(2) combination of the basis rows."""


def _mask(n: int) -> int:
    return (1 << n) - 1


def popcount(v: int) -> int:
    return bin(v).count("1")


def bits_of(v: int) -> list[int]:
    """Indices of the set bits of ``v`` in increasing order."""
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m ^= 1 << int(i)
    return m


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise DimensionError("negative qubit count")
        full = _mask(self.n)
        if self.x & ~full or self.z & ~full:
            raise DimensionError(f"bit vectors do not fit in {self.n} qubits")

    @classmethod
    def x_type(cls, n: int, support: Iterable[int]) -> "PauliOperator":
        return cls(n, mask_of(support), 0)

    @classmethod
    def z_type(cls, n: int, support: Iterable[int]) -> "PauliOperator":
        return cls(n, 0, mask_of(support))

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def from_string(cls, s: str) -> "PauliOperator":
        x = z = 0
        for i, ch in enumerate(s.strip().upper()):
            if ch == "X":
                x |= 1 << i
            elif ch == "Z":
                z |= 1 << i
            elif ch == "Y":
                x |= 1 << i
                z |= 1 << i
            elif ch != "I":
                raise ValueError(f"invalid Pauli character {ch!r}")
        return cls(len(s.strip()), x, z)

    def to_string(self) -> str:
        chars = []
        for i in range(self.n):
            xb = (self.x >> i) & 1
            zb = (self.z >> i) & 1
            chars.append("IXZY"[xb | (zb << 1)])
        return "".join(chars)

    def __str__(self) -> str:
        return self.to_string()

    @property
    def is_x_type(self) -> bool:
        return self.z == 0

    @property
    def is_z_type(self) -> bool:
        return self.x == 0

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    @property
    def support(self) -> list[int]:
        return bits_of(self.x | self.z)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        """Product up to phase (bitwise XOR of both sectors)."""
        if self.n != other.n:
            raise DimensionError(f"{self.n} vs {other.n} qubits")
        return PauliOperator(self.n, self.x ^ other.x, self.z ^ other.z)

    def restrict(self, qubits: Sequence[int]) -> "PauliOperator":
        """Restriction to ``qubits``, re-indexed in the given order."""
        x = z = 0
        for j, q in enumerate(qubits):
            x |= ((self.x >> q) & 1) << j
            z |= ((self.z >> q) & 1) << j
        return PauliOperator(len(qubits), x, z)

    def to_symplectic(self) -> np.ndarray:
        out = np.zeros(2 * self.n, dtype=np.uint8)
        for i in bits_of(self.x):
            out[i] = 1
        for i in bits_of(self.z):
            out[self.n + i] = 1
        return out


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    """0 if ``a`` and ``b`` commute, 1 if they anticommute."""
    if a.n != b.n:
        raise DimensionError(f"{a.n} vs {b.n} qubits")
    return (popcount(a.x & b.z) + popcount(a.z & b.x)) & 1


def _packed(op: PauliOperator) -> int:
    # leftmost pivot = lowest bit: x-part of qubit 0 first, then z-part
    return op.x | (op.z << op.n)


def _unpacked(v: int, n: int) -> PauliOperator:
    return PauliOperator(n, v & _mask(n), v >> n)


def rref(vectors: Sequence[int]) -> tuple[list[int], list[int]]:
    """Reduced row echelon form of packed GF(2) vectors.

    Pivots are taken at the lowest set bit. Returns ``(rows, pivots)`` with
    rows sorted by pivot position; every pivot bit appears in exactly one row.
    """
    rows: list[int] = []
    pivots: list[int] = []
    for v in vectors:
        for r, p in zip(rows, pivots):
            if (v >> p) & 1:
                v ^= r
        if not v:
            continue
        p = (v & -v).bit_length() - 1
        for i, r in enumerate(rows):
            if (r >> p) & 1:
                rows[i] = r ^ v
        rows.append(v)
        pivots.append(p)
    order = sorted(range(len(rows)), key=pivots.__getitem__)
    return [rows[i] for i in order], [pivots[i] for i in order]


def gf2_rank(vectors: Iterable[int]) -> int:
    return len(rref(list(vectors))[0])


def in_span(v: int, rows: Sequence[int], pivots: Sequence[int]) -> bool:
    for r, p in zip(rows, pivots):
        if (v >> p) & 1:
            v ^= r
    return v == 0


def kernel_basis(columns_of: Sequence[int], n: int) -> list[int]:
    """Basis of ``{v in GF(2)^n : <row, v> = 0 for every row}``.

    ``columns_of`` holds the constraint rows as packed ints over ``n`` bits.
    The result is built from the reduced echelon form, one vector per free
    column, so it is deterministic.
    """
    rows, pivots = rref(list(columns_of))
    pivot_set = set(pivots)
    basis = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = 1 << f
        for r, p in zip(rows, pivots):
            if (r >> f) & 1:
                v |= 1 << p
        basis.append(v)
    return basis


@dataclass(frozen=True)
class StabilizerMatrix:
    n: int
    rows: tuple[PauliOperator, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for r in self.rows:
            if r.n != self.n:
                raise DimensionError(f"row on {r.n} qubits in {self.n}-qubit matrix")

    @classmethod
    def from_strings(cls, strings: Sequence[str], n: int | None = None) -> "StabilizerMatrix":
        rows = tuple(PauliOperator.from_string(s) for s in strings)
        if n is None:
            if not rows:
                raise ValueError("qubit count required for an empty matrix")
            n = rows[0].n
        return cls(n, rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    @property
    def rank(self) -> int:
        return gf2_rank(_packed(r) for r in self.rows)

    def is_abelian(self) -> bool:
        return all(
            symplectic_product(a, b) == 0
            for i, a in enumerate(self.rows)
            for b in self.rows[i + 1:]
        )

    def x_masks(self) -> list[int]:
        return [r.x for r in self.rows]

    def z_masks(self) -> list[int]:
        return [r.z for r in self.rows]

    def to_array(self) -> np.ndarray:
        """Rows as a ``(len, 2n)`` uint8 symplectic matrix ``[x | z]``."""
        if not self.rows:
            return np.zeros((0, 2 * self.n), dtype=np.uint8)
        return np.stack([r.to_symplectic() for r in self.rows])

    def to_json(self) -> dict:
        return {"n": self.n, "rows": [r.to_string() for r in self.rows]}

    @classmethod
    def from_json(cls, data) -> "StabilizerMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_strings(data["rows"], data["n"])


def row_reduce(m: StabilizerMatrix) -> tuple[StabilizerMatrix, int]:
    """Canonical basis of the row space (leftmost-pivot RREF) and its rank."""
    rows, _ = rref([_packed(r) for r in m.rows])
    return StabilizerMatrix(m.n, tuple(_unpacked(v, m.n) for v in rows)), len(rows)


def decompose(target: PauliOperator, basis: StabilizerMatrix) -> tuple[int, ...]:
    """Coefficients ``c`` with ``target = prod_i basis[i]**c[i]`` (up to phase).

    Raises :class:`NotInSpan` when no such combination exists and
    :class:`DimensionError` on a qubit-count mismatch. Basis rows are assumed
    independent, which makes the coefficients unique.
    """
    if target.n != basis.n:
        raise DimensionError(f"{target.n} vs {basis.n} qubits")
    coeffs = decompose_packed(_packed(target), [_packed(r) for r in basis.rows])
    return tuple((coeffs >> i) & 1 for i in range(len(basis.rows)))


def decompose_packed(target: int, basis: Sequence[int]) -> int:
    """Like :func:`decompose` on packed ints; coefficients returned as a bitmask."""
    rows: list[int] = []
    tags: list[int] = []
    pivots: list[int] = []
    for i, v in enumerate(basis):
        tag = 1 << i
        for r, t, p in zip(rows, tags, pivots):
            if (v >> p) & 1:
                v ^= r
                tag ^= t
        if not v:
            raise ValueError("basis rows are not independent")
        p = (v & -v).bit_length() - 1
        for j, r in enumerate(rows):
            if (r >> p) & 1:
                rows[j] = r ^ v
                tags[j] ^= tag
        rows.append(v)
        tags.append(tag)
        pivots.append(p)
    coeff = 0
    for r, t, p in zip(rows, tags, pivots):
        if (target >> p) & 1:
            target ^= r
            coeff ^= t
    if target:
        raise NotInSpan("target is not in the span of the basis")
    return coeff
