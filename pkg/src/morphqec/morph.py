"""Morphing: replace a region's qubits by the logical qubits of its child code."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .codes import CssCode, extract_logicals, pair_logicals
from .pauli import (
    NotInSpan,
    PauliOperator,
    StabilizerMatrix,
    bits_of,
    decompose_packed,
    in_span,
    popcount,
    rref,
)


class MorphError(ValueError):
    pass


def _compress(mask: int, positions: Sequence[int]) -> int:
    out = 0
    for i, q in enumerate(positions):
        if (mask >> q) & 1:
            out |= 1 << i
    return out


def _subgroup_in(masks: Sequence[int], region: Sequence[int], n: int) -> list[int]:
    """Basis (on region-local indices) of the row space restricted to supp in region."""
    rset = set(region)
    out_pos = [q for q in range(n) if q not in rset]
    m = len(out_pos)
    vecs = [_compress(r, out_pos) | (_compress(r, region) << m) for r in masks]
    rows, pivots = rref(vecs)
    return [r >> m for r, p in zip(rows, pivots) if p >= m]


def restrict_stabilizer(parent: CssCode, region: Sequence[int]) -> CssCode:
    """Child code C(R): the full stabilizer subgroup supported in R, on R's qubits."""
    region = sorted(set(region))
    if any(not 0 <= q < parent.n for q in region):
        raise MorphError("region contains qubits outside the parent code")
    nr = len(region)
    xs = _subgroup_in(parent.x_stabs.x_masks(), region, parent.n)
    zs = _subgroup_in(parent.z_stabs.z_masks(), region, parent.n)
    xm = StabilizerMatrix(nr, tuple(PauliOperator(nr, v, 0) for v in xs))
    zm = StabilizerMatrix(nr, tuple(PauliOperator(nr, 0, v) for v in zs))
    lx, lz = extract_logicals(xm, zm)
    return CssCode(nr, xm, zm, lx, lz, label=f"child({parent.label})")


@dataclass(frozen=True)
class MorphSpec:
    parent: CssCode
    region: tuple[int, ...]
    child: CssCode

    @classmethod
    def build(cls, parent: CssCode, region: Sequence[int],
              child_logical_x: Sequence[PauliOperator] | None = None,
              basis: str = "canonical", seed: int | None = None) -> "MorphSpec":
        """Spec with the given (or a canonical/random) child logical X basis."""
        region = tuple(sorted(set(region)))
        child = restrict_stabilizer(parent, region)
        if child_logical_x is None and basis == "random":
            child_logical_x = random_logical_basis(child, np.random.default_rng(seed))
        if child_logical_x is not None:
            lz = pair_logicals(child.x_stabs, child.z_stabs, child_logical_x)
            child = CssCode(child.n, child.x_stabs, child.z_stabs, tuple(child_logical_x), lz, child.label)
        return cls(parent, region, child)

    @property
    def child_logical_x(self):
        return self.child.logical_x

    @property
    def child_logical_z(self):
        return self.child.logical_z


def random_logical_basis(child: CssCode, rng: np.random.Generator) -> list[PauliOperator]:
    """Uniformly random invertible recombination of the logical X's, times random stabilizers."""
    k, n = child.k, child.n
    while True:
        m = rng.integers(0, 2, size=(k, k))
        rows, _ = rref([int("".join(map(str, r[::-1])), 2) if k else 0 for r in m])
        if len(rows) == k:
            break
    out = []
    stabs = child.x_stabs.x_masks()
    for i in range(k):
        v = 0
        for j in range(k):
            if m[i, j]:
                v ^= child.logical_x[j].x
        for s in stabs:
            if rng.integers(2):
                v ^= s
        out.append(PauliOperator(n, v, 0))
    return out


@dataclass(frozen=True)
class MorphResult:
    morphed: CssCode
    qubit_map: tuple[tuple[str, int], ...]

    def to_json(self) -> dict:
        data = self.morphed.to_json()
        data["qubit_map"] = [list(e) for e in self.qubit_map]
        return data


def _rewrite(mask: int, region, survivors, basis: list[int], n_stab: int, k: int) -> int:
    inner = _compress(mask, region)
    try:
        coeff = decompose_packed(inner, basis)
    except NotInSpan:
        raise MorphError("restricted operator is not in the child stabilizer+logical span") from None
    logical = coeff >> n_stab
    return _compress(mask, survivors) | (logical << len(survivors))


def morph(spec: MorphSpec) -> MorphResult:
    """Rewrite the parent code with R replaced by the child's logical qubits."""
    parent, region, child = spec.parent, list(spec.region), spec.child
    if not region:
        qmap = tuple(("parent", q) for q in range(parent.n))
        return MorphResult(parent, qmap)
    rset = set(region)
    survivors = [q for q in range(parent.n) if q not in rset]
    kc = child.k
    n_new = len(survivors) + kc

    xb_stab, _ = rref(child.x_stabs.x_masks())
    zb_stab, _ = rref(child.z_stabs.z_masks())
    xbasis = xb_stab + [op.x for op in child.logical_x]
    zbasis = zb_stab + [op.z for op in child.logical_z]

    def sector(masks, basis, n_stab):
        return [_rewrite(m, region, survivors, basis, n_stab, kc) for m in masks]

    xs = [r for r in rref(sector(parent.x_stabs.x_masks(), xbasis, len(xb_stab)))[0]]
    zs = [r for r in rref(sector(parent.z_stabs.z_masks(), zbasis, len(zb_stab)))[0]]
    lx = sector([op.x for op in parent.logical_x], xbasis, len(xb_stab))
    lz = sector([op.z for op in parent.logical_z], zbasis, len(zb_stab))
    code = CssCode(
        n_new,
        StabilizerMatrix(n_new, tuple(PauliOperator(n_new, v, 0) for v in xs)),
        StabilizerMatrix(n_new, tuple(PauliOperator(n_new, 0, v) for v in zs)),
        tuple(PauliOperator(n_new, v, 0) for v in lx),
        tuple(PauliOperator(n_new, 0, v) for v in lz),
        label=f"morphed({parent.label})",
    )
    qmap = tuple([("parent", q) for q in survivors] + [("child", j) for j in range(kc)])
    return MorphResult(code, qmap)


def parameter_delta(parent_params: tuple[int, int, int], colex, b) -> tuple[int, int, int]:
    """Predicted (N', K', lower bound on D') after morphing a colorable ball."""
    N, K, D = parent_params
    d = colex.d
    nd, n1 = len(b.members[d]), len(b.members[1])
    max_st = max(len(colex.facet_star(e)) for e in b.members[1])
    return N - nd + n1 - d, K, D - max_st + 1


# ---------------------------------------------------------------- relabeling


def _perm_mask(mask: int, perm: Sequence[int]) -> int:
    out = 0
    for q in bits_of(mask):
        out |= 1 << perm[q]
    return out


def find_relabeling(code: CssCode, target_x: Sequence[int], target_z: Sequence[int],
                    n_old: int, mode: str = "equal") -> tuple[int, ...] | None:
    """Search permutations that keep old and new qubits in their roles.

    ``target_x``/``target_z`` are masks in the target labeling, where qubits
    ``0..n_old-1`` are surviving qubits and the rest are new ones. Returns
    ``perm`` with perm[target qubit] = code qubit, or None. ``mode='equal'``
    asks for row-space equality, ``'contains'`` for membership only.
    """
    n = code.n
    n_new = n - n_old
    cx, cxp = rref(code.x_stabs.x_masks())
    cz, czp = rref(code.z_stabs.z_masks())
    for po in itertools.permutations(range(n_old)):
        for pn in itertools.permutations(range(n_old, n)):
            perm = po + pn
            ok = all(in_span(_perm_mask(t, perm), cx, cxp) for t in target_x) and all(
                in_span(_perm_mask(t, perm), cz, czp) for t in target_z
            )
            if not ok:
                continue
            if mode == "equal":
                if len(rref([_perm_mask(t, perm) for t in target_x])[0]) != len(cx):
                    continue
                if len(rref([_perm_mask(t, perm) for t in target_z])[0]) != len(cz):
                    continue
            return perm
    return None


def masks_from_labels(terms: Sequence[Sequence[str]], labels: Sequence[str]) -> list[int]:
    """Masks from lists of qubit labels, e.g. [['1', '2', '1b']] with labels order."""
    idx = {lab: i for i, lab in enumerate(labels)}
    return [sum(1 << idx[t] for t in term) for term in terms]


def load_morph_result(path) -> MorphResult:
    data = json.loads(Path(path).read_text())
    return MorphResult(CssCode.from_json(data), tuple(tuple(e) for e in data["qubit_map"]))
