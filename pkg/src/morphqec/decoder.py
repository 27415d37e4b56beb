"""Phase-flip decoder for HCT lattices: matching, local modification, local lift."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .colex import BLUE, GREEN, RED
from .hct import HctLattice, RestrictedLattice, restricted_lattice
from .pauli import bits_of, popcount

PAIRS = ((RED, GREEN), (RED, BLUE))
BACKENDS = ("pymatching", "networkx")


class ParityError(ValueError):
    pass


class DecoderFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class Matching:
    """Mod-2 set of restricted-lattice edge indices for one color pair."""

    colors: tuple[int, int]
    edges: frozenset

    def boundary(self, rl: RestrictedLattice) -> set[int]:
        out: set[int] = set()
        for i in self.edges:
            a, b, _ = rl.edges[i]
            out ^= {a}
            out ^= {b}
        return out


def _xor_add(acc: set, item) -> None:
    if item in acc:
        acc.remove(item)
    else:
        acc.add(item)


def exhaustive_pairing_weight(defects: Sequence[int], dist) -> float:
    """Oracle: minimum total pair distance over all perfect pairings."""
    best = float("inf")

    def rec(rest, acc):
        nonlocal best
        if acc >= best:
            return
        if not rest:
            best = acc
            return
        a = rest[0]
        for i in range(1, len(rest)):
            rec(rest[1:i] + rest[i + 1:], acc + dist(a, rest[i]))

    if len(defects) % 2:
        raise ParityError("odd number of defects")
    rec(list(defects), 0)
    return best


class Decoder:
    """Three-step decoder bound to one HCT lattice.

    ``backend`` selects the exact MWPM engine: sparse blossom via pymatching
    or networkx's blossom on the complete defect graph with BFS distances.
    """

    def __init__(self, lattice: HctLattice, backend: str = "pymatching"):
        if lattice.base.d != 2:
            raise ValueError("the decoder supports 2D lattices only")
        if backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}")
        self.lattice = lattice
        self.backend = backend
        cx = lattice.base
        self.colex = cx
        self.check_vertices = tuple(sorted(lattice.x_checks))
        self.check_index = {v: i for i, v in enumerate(self.check_vertices)}
        self.restricted = {p: restricted_lattice(lattice, p) for p in PAIRS}
        self.record_of_center = {r.center: ri for ri, r in enumerate(lattice.records)}
        # qubit -> check vertices (X checks detect Z errors)
        self.qubit_checks = [[] for _ in range(lattice.n)]
        for v, sup in lattice.x_checks.items():
            for q in sup:
                self.qubit_checks[q].append(v)
        self._lift_tables = {}
        self._face_map = self._build_face_map()
        self._edge_classes = None
        self._pm = {}

    # ------------------------------------------------------------ basics
    def syndrome_of(self, error: Iterable[int]) -> frozenset:
        s: set[int] = set()
        for q in error:
            for v in self.qubit_checks[q]:
                _xor_add(s, v)
        return frozenset(s)

    def _build_face_map(self) -> list[tuple[int, ...]]:
        """Facet of the pre-morph colex -> qubits of its image in the HCT code."""
        lat, cx = self.lattice, self.colex
        out = []
        for fi, f in enumerate(cx.facets):
            if fi in lat.facet_qubit:
                out.append((lat.facet_qubit[fi],))
                continue
            ri = lat.facet_owner[fi]
            out.append(tuple(q for q, r, c, h, x in lat.cc_edges if r == ri and x in f))
        return out

    def faces_to_qubits(self, faces: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for fi in faces:
            for q in self._face_map[fi]:
                _xor_add(out, q)
        return out

    # ------------------------------------------------------------ step 1
    def _bfs(self, rl: RestrictedLattice, src: int):
        dist = {src: 0}
        pred = {src: None}
        dq = deque([src])
        while dq:
            u = dq.popleft()
            for w, ei in rl.adjacency[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    pred[w] = (u, ei)
                    dq.append(w)
        return dist, pred

    def restricted_syndrome(self, syndrome: Iterable[int], colors) -> list[int]:
        rl = self.restricted[tuple(sorted(colors))]
        return sorted(v for v in syndrome if v in rl.vertex_index)

    def match(self, syndrome: Iterable[int], colors) -> Matching:
        colors = tuple(sorted(colors))
        rl = self.restricted[colors]
        defects = self.restricted_syndrome(syndrome, colors)
        if len(defects) % 2:
            raise ParityError(f"odd defect count {len(defects)} on restricted lattice {colors}")
        if not defects:
            return Matching(colors, frozenset())
        if self.backend == "pymatching":
            return Matching(colors, frozenset(self._match_pymatching(rl, defects)))
        return Matching(colors, frozenset(self._match_networkx(rl, defects)))

    def _pm_matching(self, rl: RestrictedLattice):
        key = rl.colors
        if key not in self._pm:
            import pymatching

            m = pymatching.Matching()
            classes = self.edge_classes()[key]
            vi = rl.vertex_index
            for i, (a, b, _) in enumerate(rl.edges):
                fid = set(bits_of(int(classes[i])))
                m.add_edge(vi[a], vi[b], fault_ids=fid, weight=1.0, merge_strategy="disallow")
            if m.num_detectors < len(rl.vertices):
                raise DecoderFailure(f"isolated vertices in restricted lattice {key}")
            self._pm[key] = m
        return self._pm[key]

    def _match_pymatching(self, rl: RestrictedLattice, defects: list[int]) -> set[int]:
        m = self._pm_matching(rl)
        syn = np.zeros(m.num_detectors, dtype=np.uint8)
        for v in defects:
            syn[rl.vertex_index[v]] = 1
        pairs = m.decode_to_edges_array(syn)
        out: set[int] = set()
        for a, b in pairs:
            va, vb = rl.vertices[a], rl.vertices[b]
            _xor_add(out, rl.edge_index[(min(va, vb), max(va, vb))])
        return out

    def _match_networkx(self, rl: RestrictedLattice, defects: list[int]) -> set[int]:
        import networkx as nx

        bfs = {v: self._bfs(rl, v) for v in defects}
        g = nx.Graph()
        for a, b in itertools.combinations(defects, 2):
            if b not in bfs[a][0]:
                continue
            g.add_edge(a, b, weight=-bfs[a][0][b])
        pairs = nx.max_weight_matching(g, maxcardinality=True)
        if 2 * len(pairs) != len(defects):
            raise DecoderFailure("no perfect matching on restricted lattice")
        out: set[int] = set()
        for a, b in sorted(tuple(sorted(p)) for p in pairs):
            pred = bfs[a][1]
            u = b
            while pred[u] is not None:
                u, ei = pred[u]
                _xor_add(out, ei)
        return out

    def match_pairs(self, syndrome: Iterable[int], colors) -> list[tuple[int, int]]:
        """Defect pairs chosen by the MWPM backend."""
        colors = tuple(sorted(colors))
        rl = self.restricted[colors]
        defects = self.restricted_syndrome(syndrome, colors)
        if len(defects) % 2:
            raise ParityError(f"odd defect count {len(defects)} on restricted lattice {colors}")
        if not defects:
            return []
        if self.backend == "pymatching":
            m = self._pm_matching(rl)
            syn = np.zeros(m.num_detectors, dtype=np.uint8)
            for v in defects:
                syn[rl.vertex_index[v]] = 1
            arr = m.decode_to_matched_dets_array(syn)
            return sorted(tuple(sorted((rl.vertices[a], rl.vertices[b]))) for a, b in arr)
        import networkx as nx

        dist = {v: self._bfs(rl, v)[0] for v in defects}
        g = nx.Graph()
        for a, b in itertools.combinations(defects, 2):
            if b in dist[a]:
                g.add_edge(a, b, weight=-dist[a][b])
        return sorted(tuple(sorted(p)) for p in nx.max_weight_matching(g, maxcardinality=True))

    def matching_weight(self, m: Matching) -> int:
        return len(m.edges)

    def distance(self, colors, a: int, b: int) -> int:
        rl = self.restricted[tuple(sorted(colors))]
        return self._bfs(rl, a)[0].get(b, float("inf"))

    # ------------------------------------------------------------ step 2
    def _common_neighbor(self, center: int, a: int, c: int, want_color: int) -> int:
        """Boundary vertex w of the ball at ``center`` with (a,w,center), (c,w,center) facets."""
        cx = self.colex
        opts = []
        for w in cx.neighbors[center]:
            if cx.color[w] != want_color:
                continue
            if cx.contains((a, w, center)) and cx.contains((c, w, center)):
                opts.append(w)
        if not opts:
            raise DecoderFailure(f"no detour vertex for cc-edge ({a},{c}) of ball {center}")
        return min(opts)

    def _cc_info(self, q: int):
        """(center, hub, x) of cc-edge qubit q."""
        key = self.lattice.qubits[q]
        ri = key[1]
        return self.lattice.records[ri].center, key[2], key[3]

    def local_modify(self, m: Matching) -> Matching:
        """Replace same-color cc-edges of foreign balls by a two-edge detour."""
        rl = self.restricted[m.colors]
        cx = self.colex
        out = set(m.edges)
        for ei in sorted(m.edges):
            a, c, q = rl.edges[ei]
            if q < 0 or cx.color[a] != RED:
                continue
            v, _, _ = self._cc_info(q)
            if cx.color[v] in m.colors:
                continue
            other = m.colors[1] if m.colors[0] == RED else m.colors[0]
            w = self._common_neighbor(v, a, c, other)
            _xor_add(out, ei)
            for s, t in ((a, w), (w, c)):
                key = (min(s, t), max(s, t))
                if key not in rl.edge_index:
                    raise DecoderFailure(f"detour edge {key} missing from restricted lattice")
                _xor_add(out, rl.edge_index[key])
        res = Matching(m.colors, frozenset(out))
        if res.boundary(rl) != m.boundary(rl):
            raise DecoderFailure("local modification changed the matching boundary")
        return res

    # ------------------------------------------------------------ step 3
    def edge_image(self, colors, ei: int) -> list[tuple[int, int]]:
        """Pre-morph colex edges representing restricted edge ``ei``."""
        rl = self.restricted[tuple(sorted(colors))]
        a, c, q = rl.edges[ei]
        if q < 0:
            return [(a, c)]
        v, _, _ = self._cc_info(q)
        cx = self.colex
        if cx.color[v] in rl.colors:
            mid = v
        else:
            want = [col for col in rl.colors if col != cx.color[a]][0]
            mid = self._common_neighbor(v, a, c, want)
        return [tuple(sorted((a, mid))), tuple(sorted((mid, c)))]

    def image(self, matchings: Sequence[Matching]) -> set[tuple[int, int]]:
        out: set = set()
        for m in matchings:
            for ei in m.edges:
                for e in self.edge_image(m.colors, ei):
                    _xor_add(out, e)
        return out

    def lift_table(self, w: int):
        """(edges at w, facets at w, pattern -> minimal facet subset) for an r-vertex."""
        if w not in self._lift_tables:
            cx = self.colex
            edges = [tuple(sorted((w, u))) for u in cx.neighbors[w]]
            faces = list(cx.facet_star((w,)))
            eidx = {e: i for i, e in enumerate(edges)}
            fmask = []
            for fi in faces:
                m = 0
                for u in cx.facets[fi]:
                    if u != w:
                        m ^= 1 << eidx[tuple(sorted((w, u)))]
                fmask.append(m)
            table = {}
            nf = len(faces)
            for s in sorted(range(1 << nf), key=lambda s: (popcount(s), tuple(faces[i] for i in range(nf) if (s >> i) & 1))):
                pat = 0
                for i in range(nf):
                    if (s >> i) & 1:
                        pat ^= fmask[i]
                if pat not in table:
                    table[pat] = tuple(faces[i] for i in range(nf) if (s >> i) & 1)
            self._lift_tables[w] = (edges, faces, table)
        return self._lift_tables[w]

    def local_lift_at(self, w: int, edges_at_w: Iterable[tuple[int, int]]) -> tuple[int, ...]:
        """Minimal (then lexicographically smallest) facet set with the given local boundary."""
        edges, _, table = self.lift_table(w)
        eidx = {e: i for i, e in enumerate(edges)}
        pat = 0
        for e in edges_at_w:
            pat ^= 1 << eidx[e]
        if pat not in table:
            raise DecoderFailure(f"no local lift at vertex {w}")
        return table[pat]

    def local_lift(self, matchings: Sequence[Matching]) -> set[int]:
        img = self.image(matchings)
        cx = self.colex
        at: dict[int, list] = {}
        for e in img:
            reds = [u for u in e if cx.color[u] == RED]
            if len(reds) != 1:
                raise DecoderFailure(f"image edge {e} does not have exactly one red endpoint")
            at.setdefault(reds[0], []).append(e)
        faces: set[int] = set()
        for w in sorted(at):
            for fi in self.local_lift_at(w, at[w]):
                _xor_add(faces, fi)
        return self.faces_to_qubits(faces)

    # ------------------------------------------------------------ pipeline
    def decode(self, syndrome: Iterable[int]) -> set[int]:
        syndrome = frozenset(syndrome)
        ms = [self.local_modify(self.match(syndrome, p)) for p in PAIRS]
        corr = self.local_lift(ms)
        if self.syndrome_of(corr) != syndrome:
            raise DecoderFailure("correction syndrome differs from the input syndrome")
        return corr

    def decode_x(self, z_syndrome: Iterable) -> set[int]:
        """Bit-flip decoding by role swap; Z checks are keyed by 1-vertex tuples.

        Only valid without morphed balls, where the Z checks coincide with
        the X checks; morphed lattices have asymmetric check families.
        """
        if self.lattice.records:
            raise NotImplementedError("role-swap X decoding needs an unmorphed lattice")
        return self.decode({mu[0] if isinstance(mu, tuple) else mu for mu in z_syndrome})

    @property
    def logical_x_masks(self) -> list[int]:
        return [op.x for op in self.lattice.code.logical_x]

    def logical_class(self, qubits: Iterable[int]) -> int:
        m = 0
        for q in qubits:
            m ^= 1 << q
        return sum(1 << i for i, lx in enumerate(self.logical_x_masks) if popcount(lx & m) & 1)

    def judge(self, error: Iterable[int], correction: Iterable[int]) -> bool:
        error, correction = set(error), set(correction)
        if self.syndrome_of(error) != self.syndrome_of(correction):
            raise ValueError("correction and error have different syndromes")
        return self.logical_class(error ^ correction) == 0

    # ------------------------------------------------------------ batch path
    def edge_classes(self) -> dict:
        """Logical class (bitmask over logical X's) of every restricted edge's lift.

        Uses a linear right inverse of the local boundary map at each red
        vertex, so classes add over any matching; it agrees with the minimal
        lift up to a Z stabilizer.
        """
        if self._edge_classes is not None:
            return self._edge_classes
        cx = self.colex
        face_cls = [self.logical_class(self._face_map[fi]) for fi in range(len(cx.facets))]
        unit_cls = {}

        def edge_cls(e):
            if e not in unit_cls:
                w = e[0] if cx.color[e[0]] == RED else e[1]
                edges, _, table = self.lift_table(w)
                i = edges.index(e)
                pat = (1 << i) ^ 1 if i else 0
                c = 0
                for fi in table[pat]:
                    c ^= face_cls[fi]
                unit_cls[e] = c
            return unit_cls[e]

        out = {}
        for p, rl in self.restricted.items():
            arr = np.zeros(len(rl.edges), dtype=np.int64)
            for ei in range(len(rl.edges)):
                c = 0
                for e in self.edge_image(p, ei):
                    c ^= edge_cls(e)
                arr[ei] = c
            out[p] = arr
        self._edge_classes = out
        return out

    def correction_class(self, syndrome: Iterable[int]) -> int:
        """Logical class of decode(syndrome), via the additive edge classes."""
        cls = self.edge_classes()
        c = 0
        for p in PAIRS:
            for ei in self.match(syndrome, p).edges:
                c ^= int(cls[p][ei])
        return c

    @property
    def k(self) -> int:
        return self.lattice.code.k

    def sample_failures(self, p: float, shots: int, rng: np.random.Generator) -> int:
        """Number of logical failures among ``shots`` iid Z-noise trials."""
        if p <= 0 or shots == 0:
            return 0
        errors = (rng.random((shots, self.lattice.n)) < p).astype(np.uint8)
        return int(self.failures(errors).sum())

    def failures(self, errors: np.ndarray) -> np.ndarray:
        """Per-shot failure flags for a (shots, n) uint8 array of Z errors."""
        arrays = self._batch_arrays()
        errors = np.ascontiguousarray(errors, dtype=np.uint8)
        syn = kernels.sparse_parity(arrays["check_ptr"], arrays["check_idx"], errors)
        actual = kernels.sparse_parity(arrays["log_ptr"], arrays["log_idx"], errors)
        pred = np.zeros_like(actual)
        for p_ in PAIRS:
            m = self._pm_matching(self.restricted[p_])
            sub = np.ascontiguousarray(syn[:, arrays["cols"][p_]])
            out = m.decode_batch(sub).astype(np.uint8)
            pred[:, : out.shape[1]] ^= out[:, : actual.shape[1]]
        return np.any(pred != actual, axis=1)

    def _batch_arrays(self) -> dict:
        if not hasattr(self, "_arrays"):
            def csr(rows):
                ptr = np.zeros(len(rows) + 1, dtype=np.int32)
                ptr[1:] = np.cumsum([len(r) for r in rows])
                idx = np.array([q for r in rows for q in r], dtype=np.int32)
                return ptr, idx

            cp, ci = csr([self.lattice.x_checks[v] for v in self.check_vertices])
            lp, li = csr([bits_of(m) for m in self.logical_x_masks])
            cols = {}
            for p, rl in self.restricted.items():
                cols[p] = np.array([self.check_index[v] for v in rl.vertices], dtype=np.int64)
            self._arrays = {"check_ptr": cp, "check_idx": ci, "log_ptr": lp, "log_idx": li, "cols": cols}
            for p in PAIRS:
                self._pm_matching(self.restricted[p])
        return self._arrays
