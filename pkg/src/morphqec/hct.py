"""Hybrid color-toric (HCT) lattices built by geometrically morphing balls."""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .codes import CssCode
from .colex import RED, Colex, ColexError, ball, canonical_edges, default_hubs

METHODS = ("A1", "A2", "B", "C")


class OverlapError(ValueError):
    pass


class NotFullyMorphed(ValueError):
    pass


@dataclass(frozen=True)
class MorphRecord:
    center: int
    hubs: tuple[tuple[int, int], ...]           # (color, hub vertex)
    edges: tuple[tuple[int, int, int], ...]     # (color, hub, x): one cc-edge qubit each
    facet_ids: tuple[int, ...]

    def to_json(self) -> dict:
        return {"center": self.center, "hubs": [list(h) for h in self.hubs]}


def make_record(colex: Colex, center: int, hubs: dict[int, int] | None = None) -> MorphRecord:
    b = ball(colex, center)
    hubs = default_hubs(colex, b) if hubs is None else dict(hubs)
    for c, u in hubs.items():
        if u not in b.boundary_vertices(c, colex):
            raise ColexError(f"hub {u} is not a color-{c} boundary vertex of ball {center}")
    edges = canonical_edges(colex, b, hubs)
    return MorphRecord(center, tuple(sorted(hubs.items())), tuple(edges), tuple(sorted(b.facet_ids)))


class HctLattice:
    """A colex with a set of non-overlapping morphed balls.

    Qubits: surviving facets (ascending facet index) followed by the cc-edges
    of each record in record order. X checks sit on unmorphed interior
    vertices, Z checks on interior (d-2)-simplices outside every morphed ball.
    """

    def __init__(self, base: Colex, records: Iterable[MorphRecord] = ()):
        self.base = base
        self.records = tuple(records)
        owner = {}
        for ri, rec in enumerate(self.records):
            for fi in rec.facet_ids:
                if fi in owner:
                    raise OverlapError(
                        f"balls at {self.records[owner[fi]].center} and {rec.center} share facet {fi}"
                    )
                owner[fi] = ri
        self.facet_owner = owner
        self.morphed_centers = frozenset(r.center for r in self.records)
        keys = [("f", fi) for fi in range(len(base.facets)) if fi not in owner]
        self.n_facet_qubits = len(keys)
        self.cc_edges = []  # (qubit, record index, color, hub, x)
        for ri, rec in enumerate(self.records):
            for c, h, x in rec.edges:
                self.cc_edges.append((len(keys), ri, c, h, x))
                keys.append(("e", ri, h, x))
        self.qubits = tuple(keys)
        self.facet_qubit = {k[1]: q for q, k in enumerate(keys) if k[0] == "f"}

    @property
    def n(self) -> int:
        return len(self.qubits)

    def with_morph(self, center: int, hubs: dict[int, int] | None = None) -> "HctLattice":
        return geometric_morph(self, center, hubs)

    # -- checks
    @cached_property
    def x_checks(self) -> dict[int, tuple[int, ...]]:
        cx = self.base
        inc = {}
        for q, ri, c, h, x in self.cc_edges:
            inc.setdefault(h, []).append(q)
            inc.setdefault(x, []).append(q)
        out = {}
        for (u,) in cx.interior(0):
            if u in self.morphed_centers:
                continue
            sup = [self.facet_qubit[fi] for fi in cx.facet_star((u,)) if fi in self.facet_qubit]
            out[u] = tuple(sorted(sup + inc.get(u, [])))
        return out

    @cached_property
    def z_checks(self) -> dict[tuple, tuple[int, ...]]:
        cx = self.base
        by_record = {}
        for q, ri, c, h, x in self.cc_edges:
            by_record.setdefault(ri, []).append((q, x))
        out = {}
        for mu in cx.interior(cx.d - 2):
            if any(v in self.morphed_centers for v in mu):
                continue
            star = cx.facet_star(mu)
            sup = [self.facet_qubit[fi] for fi in star if fi in self.facet_qubit]
            touched = {self.facet_owner[fi] for fi in star if fi in self.facet_owner}
            for ri in sorted(touched):
                v = self.records[ri].center
                for q, x in by_record[ri]:
                    cnt = sum(1 for fi in star if v in cx.facets[fi] and x in cx.facets[fi])
                    if cnt & 1:
                        sup.append(q)
            out[mu] = tuple(sorted(sup))
        return out

    @cached_property
    def code(self) -> CssCode:
        return CssCode.from_supports(
            self.n, list(self.x_checks.values()), list(self.z_checks.values()),
            label=f"HCT({len(self.records)} morphs)",
        )

    def qubit_vertices(self, q: int) -> tuple[int, ...]:
        key = self.qubits[q]
        if key[0] == "f":
            return self.base.facets[key[1]]
        return key[2], key[3]

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "morph_records": [r.to_json() for r in self.records],
                "qubits": [list(k) for k in self.qubits]}

    @classmethod
    def from_json(cls, data) -> "HctLattice":
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        base = Colex.from_json(data["base"])
        recs = [make_record(base, r["center"], {c: u for c, u in r["hubs"]}) for r in data["morph_records"]]
        return cls(base, recs)


def geometric_morph(lattice: HctLattice, center: int, hubs: dict[int, int] | None = None) -> HctLattice:
    """Morph the ball at ``center``: remove its facets, add hub-to-leaf cc-edges."""
    rec = make_record(lattice.base, center, hubs)
    clash = [fi for fi in rec.facet_ids if fi in lattice.facet_owner]
    if clash:
        raise OverlapError(f"ball at {center} overlaps an already morphed ball")
    return HctLattice(lattice.base, lattice.records + (rec,))


def _random_hubs(colex: Colex, center: int, rng: np.random.Generator) -> dict[int, int]:
    b = ball(colex, center)
    hubs = {}
    for c in range(1, colex.d + 2):
        if c != colex.color[center]:
            cands = b.boundary_vertices(c, colex)
            hubs[c] = int(cands[rng.integers(len(cands))])
    return hubs


def generate_hct(colex: Colex, method: str, q: float, seed: int | None = None) -> HctLattice:
    """Random HCT lattice by one of the generation methods A1, A2, B, C."""
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    if any(colex.is_boundary((v,)) for v in range(colex.n_vertices)):
        raise ColexError("generate_hct needs a closed colex")
    rng = np.random.default_rng(seed)
    V = colex.n_vertices
    if method in ("A1", "A2"):
        order = [v for v in range(V) if colex.color[v] == RED]
    elif method == "B":
        order = [v for c in (1, 2, 3) for v in range(V) if colex.color[v] == c]
    else:
        order = [int(v) for v in rng.permutation(V)]
    used: set[int] = set()
    records = []
    for v in order:
        if not rng.random() < q:
            continue
        fids = colex.facet_star((v,))
        if used.intersection(fids):
            continue
        hubs = None if method == "A1" else _random_hubs(colex, v, rng)
        rec = make_record(colex, v, hubs)
        used.update(fids)
        records.append(rec)
    return HctLattice(colex, records)


# ---------------------------------------------------------------- toric limit


def split_into_toric_copies(lattice: HctLattice) -> list[CssCode]:
    """Partition a fully morphed 2D lattice into one toric code per cc-edge color."""
    if lattice.n_facet_qubits:
        raise NotFullyMorphed(f"{lattice.n_facet_qubits} facet qubits remain")
    colors = sorted({c for _, _, c, _, _ in lattice.cc_edges})
    groups = {c: [q for q, _, cc, _, _ in lattice.cc_edges if cc == c] for c in colors}
    local = {c: {q: i for i, q in enumerate(qs)} for c, qs in groups.items()}
    color_of = {q: c for c, qs in groups.items() for q in qs}
    xs = {c: [] for c in colors}
    zs = {c: [] for c in colors}
    for target, checks in ((xs, lattice.x_checks), (zs, lattice.z_checks)):
        for sup in checks.values():
            if not sup:
                continue
            cs = {color_of[q] for q in sup}
            if len(cs) != 1:
                raise ValueError("a check acts on more than one cc-edge color class")
            c = cs.pop()
            target[c].append([local[c][q] for q in sup])
    return [CssCode.from_supports(len(groups[c]), xs[c], zs[c], label=f"toric-copy-{c}") for c in colors]


def toric_structure(code: CssCode) -> dict:
    """Graph data of a toric-type code: vertex degrees, plaquette sizes, Euler characteristic."""
    xdeg = sorted({r.weight for r in code.x_stabs})
    zdeg = sorted({r.weight for r in code.z_stabs})
    qx = np.zeros(code.n, dtype=int)
    qz = np.zeros(code.n, dtype=int)
    for r in code.x_stabs:
        qx[r.support] += 1
    for r in code.z_stabs:
        qz[r.support] += 1
    V, E, F = len(code.x_stabs), code.n, len(code.z_stabs)
    return {
        "vertex_degrees": xdeg,
        "plaquette_sizes": zdeg,
        "edges_per_vertex_pair": sorted(set(qx.tolist())),
        "edges_per_plaquette_pair": sorted(set(qz.tolist())),
        "euler": V - E + F,
        "k": code.k,
        "square": xdeg == [4] and zdeg == [4] and set(qx) == {2} and set(qz) == {2} and V - E + F == 0,
    }


# ---------------------------------------------------------------- restricted lattices


@dataclass(frozen=True)
class RestrictedLattice:
    """Two-color sublattice used for matching.

    ``edges[i] = (a, b, qubit)`` where ``qubit`` is the cc-edge qubit for a
    cc-edge and -1 for an ordinary colex edge.
    """

    colors: tuple[int, int]
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]

    @cached_property
    def vertex_index(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(min(a, b), max(a, b)): i for i, (a, b, _) in enumerate(self.edges)}

    @cached_property
    def adjacency(self) -> dict[int, list[tuple[int, int]]]:
        adj = {v: [] for v in self.vertices}
        for i, (a, b, _) in enumerate(self.edges):
            adj[a].append((b, i))
            adj[b].append((a, i))
        for v in adj:
            adj[v].sort()
        return adj

    def graph(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        for i, (a, b, q) in enumerate(self.edges):
            g.add_edge(a, b, index=i, qubit=q)
        return g


def restricted_lattice(lattice: HctLattice, colors: Sequence[int]) -> RestrictedLattice:
    cx = lattice.base
    pair = tuple(sorted(colors))
    keep = lambda v: cx.color[v] in pair and v not in lattice.morphed_centers  # noqa: E731
    verts = tuple(v for v in range(cx.n_vertices) if keep(v))
    edges = []
    for a, b in cx.simplices[1]:
        if keep(a) and keep(b):
            edges.append((a, b, -1))
    for q, ri, c, h, x in lattice.cc_edges:
        if c in pair:
            edges.append((min(h, x), max(h, x), q))
    seen = set()
    for a, b, _ in edges:
        if (a, b) in seen:
            raise ValueError(f"parallel edges between {a} and {b}")
        seen.add((a, b))
    return RestrictedLattice(pair, verts, tuple(edges))
