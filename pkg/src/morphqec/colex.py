"""Colored simplicial complexes (colexes), balls and ball codes."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .codes import CssCode

RED, GREEN, BLUE = 1, 2, 3


class ColexError(ValueError):
    pass


def _faces(simplex: tuple, k: int):
    return itertools.combinations(simplex, k + 1)


class Colex:
    """A d-colex stored by its maximal simplices (facets).

    Vertex ids are ``0..V-1``; ``color[v]`` lies in ``1..d+1``. Every lower
    simplex is a face of some facet. ``coords``/``period`` are optional and
    only used to orient hub choices translation-invariantly.
    """

    def __init__(self, d: int, color: Sequence[int], facets: Iterable[Sequence[int]],
                 coords: Sequence[Sequence[int]] | None = None,
                 period: Sequence[int] | None = None, validate: bool = True):
        self.d = d
        self.color = tuple(int(c) for c in color)
        self.facets = tuple(sorted(tuple(sorted(f)) for f in facets))
        self.coords = None if coords is None else np.asarray(coords, dtype=np.int64)
        self.period = None if period is None else np.asarray(period, dtype=np.int64)
        self.simplices: list[list[tuple]] = []
        self._index: list[dict] = []
        star: dict[tuple, list[int]] = {}
        for fi, f in enumerate(self.facets):
            for k in range(d + 1):
                for s in _faces(f, k):
                    star.setdefault(s, []).append(fi)
        for k in range(d + 1):
            sk = sorted(s for s in star if len(s) == k + 1)
            self.simplices.append(sk)
            self._index.append({s: i for i, s in enumerate(sk)})
        self._facet_star = {s: tuple(v) for s, v in star.items()}
        bnd = set()
        for s in self.simplices[d - 1] if d >= 1 else []:
            if len(self._facet_star[s]) == 1:
                for k in range(d):
                    bnd.update(_faces(s, k))
        self._boundary = bnd
        if validate:
            self.validate()

    # -- queries
    @property
    def n_vertices(self) -> int:
        return len(self.color)

    def index(self, simplex: Sequence[int]) -> int:
        s = tuple(sorted(simplex))
        return self._index[len(s) - 1][s]

    def contains(self, simplex: Sequence[int]) -> bool:
        return tuple(sorted(simplex)) in self._facet_star

    def facet_star(self, simplex: Sequence[int]) -> tuple[int, ...]:
        """Indices of the d-simplices containing ``simplex``."""
        return self._facet_star.get(tuple(sorted(simplex)), ())

    def star(self, simplex: Sequence[int], k: int) -> list[tuple]:
        """k-simplices containing ``simplex`` (St_k)."""
        s = set(simplex)
        out = set()
        for fi in self.facet_star(simplex):
            rest = [v for v in self.facets[fi] if v not in s]
            for extra in itertools.combinations(rest, k + 1 - len(s)):
                out.add(tuple(sorted(s.union(extra))))
        return sorted(out)

    def join(self, *simplices: Sequence[int]) -> tuple | None:
        """Smallest simplex containing all arguments, or None."""
        s = tuple(sorted(set().union(*map(set, simplices))))
        return s if s in self._facet_star else None

    def is_boundary(self, simplex: Sequence[int]) -> bool:
        return tuple(sorted(simplex)) in self._boundary

    def interior(self, k: int) -> list[tuple]:
        return [s for s in self.simplices[k] if s not in self._boundary]

    def simplex_colors(self, simplex: Sequence[int]) -> frozenset:
        return frozenset(self.color[v] for v in simplex)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        nb = [set() for _ in range(self.n_vertices)]
        for a, b in self.simplices[1]:
            nb[a].add(b)
            nb[b].add(a)
        return tuple(tuple(sorted(s)) for s in nb)

    def displacement(self, v: int, u: int) -> tuple | None:
        """Minimum-image coordinate offset u - v when coordinates are known."""
        if self.coords is None:
            return None
        dv = self.coords[u] - self.coords[v]
        if self.period is not None:
            dv = (dv + self.period // 2) % self.period - self.period // 2
        return tuple(int(x) for x in dv)

    def validate(self) -> None:
        d = self.d
        for f in self.facets:
            if len(f) != d + 1:
                raise ColexError(f"facet {f} is not a {d}-simplex")
            if len({self.color[v] for v in f}) != d + 1:
                raise ColexError(f"facet {f} is not properly colored")
        if any(not 1 <= c <= d + 1 for c in self.color):
            raise ColexError("colors must lie in 1..d+1")
        for s in self.simplices[d - 1]:
            if len(self._facet_star[s]) > 2:
                raise ColexError(f"(d-1)-simplex {s} lies in more than two facets")
        if len(self.simplices[0]) != self.n_vertices:
            raise ColexError("every vertex must lie in a facet")

    def dual_bipartition(self) -> list[int]:
        """2-coloring (0/1 per facet) of the facet dual graph, by BFS."""
        side = [-1] * len(self.facets)
        for start in range(len(self.facets)):
            if side[start] >= 0:
                continue
            side[start] = 0
            queue = [start]
            while queue:
                f = queue.pop()
                for s in _faces(self.facets[f], self.d - 1):
                    for g in self._facet_star[s]:
                        if g == f:
                            continue
                        if side[g] < 0:
                            side[g] = 1 - side[f]
                            queue.append(g)
                        elif side[g] == side[f]:
                            raise ColexError("facet dual graph is not bipartite")
        return side

    def to_json(self) -> dict:
        out = {"d": self.d, "color": list(self.color), "facets": [list(f) for f in self.facets]}
        if self.coords is not None:
            out["coords"] = self.coords.tolist()
        if self.period is not None:
            out["period"] = self.period.tolist()
        return out

    @classmethod
    def from_json(cls, data) -> "Colex":
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        return cls(data["d"], data["color"], data["facets"], data.get("coords"), data.get("period"))


# ---------------------------------------------------------------- lattices


def triangular_torus(L: int) -> Colex:
    """Periodic L x L triangular lattice, six triangles per vertex."""
    if L % 3 or L < 6:
        raise ColexError(f"triangular_torus needs L a multiple of 3 and L >= 6 (got {L}) "
                         "so the 3-coloring closes around the torus")
    vid = lambda x, y: (x % L) * L + (y % L)  # noqa: E731
    color = [((x - y) % 3) + 1 for x in range(L) for y in range(L)]
    coords = [(x, y) for x in range(L) for y in range(L)]
    facets = []
    for x in range(L):
        for y in range(L):
            facets.append((vid(x, y), vid(x + 1, y), vid(x, y + 1)))
            facets.append((vid(x + 1, y), vid(x, y + 1), vid(x + 1, y + 1)))
    return Colex(2, color, facets, coords, (L, L))


def qrm_colex(d: int) -> Colex:
    """Two nested d-simplices: outer vertices 0..d, inner vertices d+1..2d+1.

    Facets are indexed by the nonempty set S of colors taken from the inner
    simplex.
    """
    color = [c + 1 for c in range(d + 1)] * 2
    facets = []
    for r in range(1, d + 2):
        for S in itertools.combinations(range(d + 1), r):
            facets.append(tuple((d + 1 + c) if c in S else c for c in range(d + 1)))
    return Colex(d, color, facets)


def hyperoctahedron_colex(d: int) -> Colex:
    """Center vertex 0 (color 1) coned over the boundary of the d-cross-polytope."""
    color = [1] + [i + 2 for i in range(d) for _ in (0, 1)]
    facets = []
    for signs in itertools.product((0, 1), repeat=d):
        facets.append((0,) + tuple(1 + 2 * i + s for i, s in enumerate(signs)))
    return Colex(d, color, facets)


def cone(triangles: Sequence[Sequence[int]], colors: Sequence[int], center_color: int) -> Colex:
    """Cone a colored (d-1)-sphere triangulation from a new vertex (id = len(colors))."""
    c = len(colors)
    facets = [tuple(t) + (c,) for t in triangles]
    d = len(facets[0]) - 1
    return Colex(d, list(colors) + [center_color], facets)


def truncated_octahedron_ball() -> Colex:
    """Ball dual to a truncated octahedron: cone over the tetrakis hexahedron."""
    corners = list(itertools.product((-1, 1), repeat=3))
    centers = [(i, s) for i in range(3) for s in (-1, 1)]
    colors = [3 if sum(c < 0 for c in p) % 2 == 0 else 4 for p in corners] + [2] * 6
    tris = []
    for fi, (i, s) in enumerate(centers):
        on_face = [ci for ci, p in enumerate(corners) if p[i] == s]
        for a, b in itertools.combinations(on_face, 2):
            if sum(x != y for x, y in zip(corners[a], corners[b])) == 1:
                tris.append((a, b, 8 + fi))
    return cone(tris, colors, 1)


def _barycentric_sphere(faces: Sequence[Sequence[int]]):
    """Barycentric subdivision of a polyhedron surface given as cyclic faces.

    Returns (triangles, colors) with color 4 on original vertices, 3 on edge
    midpoints and 2 on face centers.
    """
    verts = sorted({v for f in faces for v in f})
    edges = sorted({tuple(sorted((f[i], f[(i + 1) % len(f)]))) for f in faces for i in range(len(f))})
    vid = {v: i for i, v in enumerate(verts)}
    eid = {e: len(verts) + i for i, e in enumerate(edges)}
    fid0 = len(verts) + len(edges)
    colors = [4] * len(verts) + [3] * len(edges) + [2] * len(faces)
    tris = []
    for fi, f in enumerate(faces):
        for i in range(len(f)):
            e = tuple(sorted((f[i], f[(i + 1) % len(f)])))
            for v in e:
                tris.append((vid[v], eid[e], fid0 + fi))
    return tris, colors


def truncated_cuboctahedron_ball() -> Colex:
    """Cone over the barycentric subdivision of the cube (48 triangles)."""
    corners = list(itertools.product((0, 1), repeat=3))
    faces = []
    for i in range(3):
        for s in (0, 1):
            quad = [c for c in corners if c[i] == s]
            a = quad[0]
            cyc = [a]
            while len(cyc) < 4:
                nxt = next(c for c in quad if c not in cyc
                           and sum(x != y for x, y in zip(c, cyc[-1])) == 1)
                cyc.append(nxt)
            faces.append([corners.index(c) for c in cyc])
    tris, colors = _barycentric_sphere(faces)
    return cone(tris, colors, 1)


def truncated_icosidodecahedron_ball() -> Colex:
    """Cone over the barycentric subdivision of the icosahedron (120 triangles)."""
    phi = (1 + 5 ** 0.5) / 2
    pts = []
    for a, b in itertools.product((-1, 1), repeat=2):
        pts += [(0, a, b * phi), (a, b * phi, 0), (b * phi, 0, a)]
    pts = np.array(pts)
    dist = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    adj = np.isclose(dist, 2.0)
    faces = [t for t in itertools.combinations(range(12), 3)
             if adj[t[0], t[1]] and adj[t[1], t[2]] and adj[t[0], t[2]]]
    tris, colors = _barycentric_sphere(faces)
    return cone(tris, colors, 1)


BUILTIN_BALLS = {
    "hyperoct3": lambda: hyperoctahedron_colex(3),
    "truncated-octahedron": truncated_octahedron_ball,
    "truncated-cuboctahedron": truncated_cuboctahedron_ball,
    "truncated-icosidodecahedron": truncated_icosidodecahedron_ball,
}


# ---------------------------------------------------------------- balls


@dataclass(frozen=True)
class BallRegion:
    center: int
    members: tuple[tuple[tuple, ...], ...]
    boundary: tuple[tuple[tuple, ...], ...]
    facet_ids: tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.members) - 1

    def boundary_vertices(self, color: int | None, colex: Colex) -> list[int]:
        vs = [s[0] for s in self.boundary[0]]
        return vs if color is None else [v for v in vs if colex.color[v] == color]


def ball(colex: Colex, v: int) -> BallRegion:
    """B^v: simplices containing v, and the faces of ball facets avoiding v."""
    if colex.is_boundary((v,)):
        raise ColexError(f"vertex {v} lies on the boundary of the colex")
    fids = colex.facet_star((v,))
    members = tuple(tuple(colex.star((v,), k)) for k in range(colex.d + 1))
    bnd = [set() for _ in range(colex.d + 1)]
    for fi in fids:
        rest = tuple(u for u in colex.facets[fi] if u != v)
        for k in range(colex.d):
            bnd[k].update(_faces(rest, k))
    return BallRegion(v, members, tuple(tuple(sorted(b)) for b in bnd), tuple(fids))


def color_code(colex: Colex) -> CssCode:
    """Color code: qubits on facets, X on interior vertices, Z on interior (d-2)-simplices."""
    d = colex.d
    xs = [colex.facet_star(s) for s in colex.interior(0)]
    zs = [colex.facet_star(s) for s in colex.interior(d - 2)]
    return CssCode.from_supports(len(colex.facets), xs, zs, label=f"color-code-{d}D")


def ball_code(colex: Colex, b: BallRegion, logical_x: Sequence | None = None) -> CssCode:
    """Child code of the ball: qubits are the ball facets in ascending facet-index order."""
    local = {fi: i for i, fi in enumerate(sorted(b.facet_ids))}
    loc = lambda s: [local[fi] for fi in colex.facet_star(s)]  # noqa: E731
    xs = [loc((b.center,))]
    zs = [loc(mu) for mu in b.members[colex.d - 2]]
    code = CssCode.from_supports(len(local), xs, zs, label=f"ball({b.center})")
    if logical_x is None:
        return code
    from .codes import pair_logicals
    lz = pair_logicals(code.x_stabs, code.z_stabs, logical_x)
    return CssCode(code.n, code.x_stabs, code.z_stabs, tuple(logical_x), lz, code.label)


def default_hubs(colex: Colex, b: BallRegion) -> dict[int, int]:
    """Fixed hub per boundary color.

    With coordinates, the hub is the boundary vertex whose minimum-image
    offset from the center is smallest (translation invariant); otherwise
    the smallest vertex id.
    """
    hubs = {}
    cv = colex.color[b.center]
    for c in range(1, colex.d + 2):
        if c == cv:
            continue
        cands = b.boundary_vertices(c, colex)
        if colex.coords is not None:
            hubs[c] = min(cands, key=lambda u: (colex.displacement(b.center, u), u))
        else:
            hubs[c] = min(cands)
    return hubs


def canonical_edges(colex: Colex, b: BallRegion, hubs: dict[int, int]) -> list[tuple[int, int, int]]:
    """(color, hub, x) for each non-hub boundary vertex x, by color then id."""
    out = []
    for c in sorted(hubs):
        for x in b.boundary_vertices(c, colex):
            if x != hubs[c]:
                out.append((c, hubs[c], x))
    return out


def canonical_ball_code(colex: Colex, b: BallRegion, hubs: dict[int, int] | None = None):
    """Ball code with logical X(e) on St_d(center, x) for each canonical cc-edge.

    Returns (code, edges) where edges[i] = (color, hub, x) labels logical i.
    """
    from .pauli import PauliOperator

    hubs = default_hubs(colex, b) if hubs is None else hubs
    edges = canonical_edges(colex, b, hubs)
    local = {fi: i for i, fi in enumerate(sorted(b.facet_ids))}
    n = len(local)
    lx = [PauliOperator.x_type(n, [local[fi] for fi in colex.facet_star((b.center, x))])
          for _, _, x in edges]
    return ball_code(colex, b, lx), edges
