"""From knot diagrams to reduced Z[G] complexes.

PD conventions: a crossing is a 4-tuple of edge labels listed
counterclockwise starting at the incoming under-strand edge, as in
X[a,b,c,d] planar-diagram notation.  In parsed text the edges must be
numbered consecutively along the orientation, which determines crossing
signs.  Braid input closes positive letters to positive crossings, so
[1,1,1] closes to the right-handed trefoil (s = +2).

The cube differential uses the reduced Frobenius rules: on unmarked
circles m(X,X) = -G X and Delta(1) = 1 x X + X x 1 + G 1 x 1,
Delta(X) = X x X; at the marked circle merge(*,1) = *, merge(*,X) = 0,
split(*) = * x X + G * x 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .complexes import (
    FreeComplex,
    Grading,
    field_decompose,
    g1_dimensions,
    integral_g0_table,
)
from .ring import GMonomial, GPolynomial, CoefficientSpec


class DiagramError(ValueError):
    pass


class ResourceCapExceeded(RuntimeError):
    pass


@dataclass
class PDCode:
    """Planar diagram of an oriented knot.

    crossings[c] lists the four edge labels counterclockwise from the
    incoming under-strand; signs[c] is the crossing sign.  loops counts
    crossingless circle components (only the 0-crossing unknot has one).
    """

    crossings: list
    signs: list
    loops: int = 0

    @property
    def n_plus(self):
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self):
        return sum(1 for s in self.signs if s < 0)

    def edges(self):
        out = set()
        for t in self.crossings:
            out.update(t)
        return out

    def min_edge(self):
        return min(self.edges()) if self.crossings else 0

    def mirror(self):
        """Swap over and under strands everywhere.

        Rotating each tuple by one slot makes the old over-strand the
        under-strand; signs flip.
        """
        cr = []
        for (a, b, c, d), s in zip(self.crossings, self.signs):
            # over-strand direction depends on sign; start at its incoming edge
            cr.append((d, a, b, c) if s > 0 else (b, c, d, a))
        return PDCode(cr, [-s for s in self.signs], self.loops)

    def successor(self):
        """Map edge -> next edge along the orientation."""
        succ = {}
        for (a, b, c, d), s in zip(self.crossings, self.signs):
            succ[a] = c
            if s > 0:
                succ[d] = b
            else:
                succ[b] = d
        return succ

    def is_knot(self):
        if not self.crossings:
            return self.loops == 1
        if self.loops:
            return False
        succ = self.successor()
        edges = self.edges()
        if len(succ) != len(edges):
            return False
        start = next(iter(edges))
        seen = {start}
        e = succ[start]
        while e != start:
            if e in seen:
                return False
            seen.add(e)
            e = succ[e]
        return len(seen) == len(edges)


@dataclass(frozen=True)
class BasePoint:
    edge: int


UNKNOT_0 = PDCode([], [], loops=1)

_X_RE = re.compile(r"X\[\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\]")


def parse_pd(text: str) -> PDCode:
    """Parse `X[a,b,c,d] X[...] ...` with edges numbered along orientation.

    An input with no crossings denotes the 0-crossing unknot.
    """
    tuples = [tuple(map(int, m.groups())) for m in _X_RE.finditer(text)]
    if not tuples:
        if text.strip() in ("", "U", "unknot", "PD[]"):
            return UNKNOT_0
        raise DiagramError(f"cannot parse PD text {text!r}")
    n2 = 2 * len(tuples)
    counts = {}
    for t in tuples:
        for e in t:
            counts[e] = counts.get(e, 0) + 1
    if sorted(counts) != list(range(1, n2 + 1)) or set(counts.values()) != {2}:
        raise DiagramError("PD edges must each occur exactly twice, numbered 1..2n")

    def succ(e):
        return e % n2 + 1

    signs = []
    for a, b, c, d in tuples:
        if succ(a) != c:
            raise DiagramError(
                f"crossing X[{a},{b},{c},{d}]: under-strand must run a -> a+1"
            )
        if succ(d) == b:
            signs.append(1)
        elif succ(b) == d:
            signs.append(-1)
        else:
            raise DiagramError(
                f"crossing X[{a},{b},{c},{d}]: over-strand edges not consecutive"
            )
    pd = PDCode(tuples, signs)
    if not pd.is_knot():
        raise DiagramError("diagram is not a single-component knot")
    return pd


def parse_braid(word) -> PDCode:
    """Close a braid word (nonzero integers) to a knot PD code.

    Positive letters give positive crossings.  The closure must be a
    single component.
    """
    word = list(word)
    if not word:
        return UNKNOT_0
    if any(not isinstance(x, int) or x == 0 for x in word):
        raise DiagramError("braid letters are nonzero integers")
    m = max(abs(x) for x in word) + 1
    # knot check via the underlying permutation
    perm = list(range(m))
    for x in word:
        s = abs(x) - 1
        perm[s], perm[s + 1] = perm[s + 1], perm[s]
    seen, cyc, p = set(), 0, 0
    while len(seen) < m:
        start = next(i for i in range(m) if i not in seen)
        cyc += 1
        p = start
        while p not in seen:
            seen.add(p)
            p = perm[p]
    if cyc != 1:
        raise DiagramError("braid closure has more than one component")

    parent = {}

    def find(e):
        while parent.get(e, e) != e:
            parent[e] = parent.get(parent[e], parent[e])
            e = parent[e]
        return e

    def union(e, f):
        parent[find(e)] = find(f)

    nxt = iter(range(1, 10 * len(word) + m + 1))
    cur = [next(nxt) for _ in range(m)]
    top = list(cur)
    crossings, signs = [], []
    for x in word:
        s = abs(x) - 1
        a, b = cur[s], cur[s + 1]
        c, d = next(nxt), next(nxt)
        if x > 0:
            # under a -> d, over b -> c
            crossings.append((a, c, d, b))
            signs.append(1)
        else:
            # under b -> c, over a -> d
            crossings.append((b, a, c, d))
            signs.append(-1)
        cur[s], cur[s + 1] = c, d
    for pos in range(m):
        union(cur[pos], top[pos])
    canon = {}
    crossings = [tuple(canon.setdefault(find(e), len(canon) + 1) for e in t) for t in crossings]
    pd = PDCode(crossings, signs)
    if not pd.is_knot():
        raise DiagramError("braid closure is not a knot")
    return pd


# -- resolutions -------------------------------------------------------


@dataclass
class ResolutionState:
    """Circles of one vertex of the cube: edge -> circle index."""

    vertex: int
    circle_of: dict
    n_circles: int
    marked: int


def _smoothing_pairs(bit):
    # positions counterclockwise from the incoming under-strand:
    # 0-smoothing joins (0,1) and (2,3); 1-smoothing joins (0,3) and (1,2)
    return ((0, 1), (2, 3)) if bit == 0 else ((0, 3), (1, 2))


def resolve(pd: PDCode, vertex: int, base: BasePoint) -> ResolutionState:
    """Circles of the resolution given by the vertex bit vector."""
    if not pd.crossings:
        return ResolutionState(0, {1: 0}, 1, 0)
    parent = {}

    def find(x):
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != root:
            parent[x], x = root, parent[x]
        return root

    def union(x, y):
        parent[find(x)] = find(y)

    # nodes are edge-ends (edge, side); the two ends of an edge are joined
    ends = {}
    for c, t in enumerate(pd.crossings):
        bit = (vertex >> c) & 1
        for p1, p2 in _smoothing_pairs(bit):
            union((c, p1), (c, p2))
    for c, t in enumerate(pd.crossings):
        for p, e in enumerate(t):
            ends.setdefault(e, []).append((c, p))
    for e, locs in ends.items():
        union(locs[0], locs[1] if len(locs) > 1 else locs[0])
    circle_of, n = {}, 0
    roots = {}
    for e, locs in sorted(ends.items()):
        r = find(locs[0])
        if r not in roots:
            roots[r] = n
            n += 1
        circle_of[e] = roots[r]
    marked = circle_of[base.edge]
    return ResolutionState(vertex, circle_of, n, marked)


# -- the reduced cube --------------------------------------------------

LABEL_ONE, LABEL_X = 0, 1

DEFAULT_GENERATOR_CAP = 2_000_000


def build_reduced_complex(pd: PDCode, base: BasePoint = None, cap=DEFAULT_GENERATOR_CAP):
    """Reduced Z[G] complex of a knot diagram, eliminated column by column.

    Generators of the cube are (vertex, labels of unmarked circles);
    columns (cube weights) are materialized in order and unit entries
    between consecutive columns are cancelled immediately, which keeps
    the live generator count near the size of the final answer.
    """
    if not pd.is_knot():
        raise DiagramError("reduced complex requires a single-component knot")
    if base is None:
        base = BasePoint(pd.min_edge()) if pd.crossings else BasePoint(1)
    if pd.crossings and base.edge not in pd.edges():
        raise DiagramError(f"base point edge {base.edge} not in diagram")
    n = len(pd.crossings)
    np_, nm = pd.n_plus, pd.n_minus
    if n == 0:
        return FreeComplex([(0, 0)])

    states = {}

    def state(v):
        if v not in states:
            states[v] = resolve(pd, v, base)
        return states[v]

    def grading(v, labels):
        st = state(v)
        r = bin(v).count("1")
        ones = xs = 0
        for c in range(st.n_circles):
            if c == st.marked:
                continue
            if (labels >> c) & 1 == LABEL_X:
                xs += 1
            else:
                ones += 1
        return Grading(r - nm, (ones - xs) + r + np_ - 2 * nm)

    gens = {}  # id -> (vertex, labels)
    gid = {}  # (vertex, labels) -> id
    gradings = {}
    out_, in_ = {}, {}
    counter = iter(range(10**9))

    def gen_id(v, labels):
        key = (v, labels)
        if key not in gid:
            k = next(counter)
            if len(gens) + 1 > cap:
                raise ResourceCapExceeded(
                    f"generator cap {cap} exceeded while building the cube"
                )
            gid[key] = k
            gens[k] = key
            gradings[k] = grading(v, labels)
            out_[k] = {}
            in_[k] = {}
        return gid[key]

    def add_entry(s, t, mono):
        cur = out_[s].get(t)
        new = mono if cur is None else cur + mono
        if new:
            out_[s][t] = new
            in_[t][s] = new
        else:
            out_[s].pop(t, None)
            in_[t].pop(s, None)

    def edge_terms(v, labels, c):
        """Targets of flipping crossing c on generator (v, labels)."""
        st, st2 = state(v), state(v | (1 << c))
        sign = -1 if bin(v & ((1 << c) - 1)).count("1") % 2 else 1
        # circle correspondence via shared edges
        image = {}
        for e, circ in st.circle_of.items():
            image.setdefault(circ, set()).add(st2.circle_of[e])
        if st2.n_circles == st.n_circles - 1:  # merge
            pair = [a for a, im in image.items() if len(im) == 1 and any(
                len(image[b]) == 1 and image[b] == im and b != a for b in image)]
            merged = [a for a in image if len(image[a]) == 1]
            # the two merging circles map to one common target
            target_count = {}
            for a, im in image.items():
                t = next(iter(im))
                target_count.setdefault(t, []).append(a)
            (tgt, srcs) = next((t, s) for t, s in target_count.items() if len(s) == 2)
            a, b = srcs
            lab_a = None if a == st.marked else (labels >> a) & 1
            lab_b = None if b == st.marked else (labels >> b) & 1
            if lab_a is None or lab_b is None:
                unmarked = lab_b if lab_a is None else lab_a
                # merge(*, 1) = *, merge(*, X) = 0
                results = [] if unmarked == LABEL_X else [(GMonomial(sign), None)]
            else:
                if lab_a == LABEL_X and lab_b == LABEL_X:
                    results = [(GMonomial(-sign, 1), LABEL_X)]
                elif lab_a == LABEL_X or lab_b == LABEL_X:
                    results = [(GMonomial(sign), LABEL_X)]
                else:
                    results = [(GMonomial(sign), LABEL_ONE)]
            terms = []
            for mono, lab in results:
                new = 0
                for circ2 in range(st2.n_circles):
                    if circ2 == st2.marked:
                        continue
                    # label copied from the preimage circle
                    pre = [a2 for a2, im in image.items() if circ2 in im]
                    a2 = pre[0] if len(pre) == 1 else None
                    if a2 is not None and a2 not in (a, b):
                        if (labels >> a2) & 1 == LABEL_X:
                            new |= 1 << circ2
                    elif circ2 == tgt:
                        if lab == LABEL_X:
                            new |= 1 << circ2
                terms.append((mono, new))
            return terms
        # split: one circle of v maps to two of v'
        (src, (w1, w2)) = next(
            (a, tuple(sorted(im))) for a, im in image.items() if len(im) == 2
        )
        base_mask = 0
        for a2, im in image.items():
            if a2 == src or a2 == st.marked:
                continue
            if (labels >> a2) & 1 == LABEL_X:
                base_mask |= 1 << next(iter(im))
        if src == st.marked:
            unmk = w1 if w2 == st2.marked else w2
            # split(*) = * x X + G * x 1
            return [
                (GMonomial(sign), base_mask | (1 << unmk)),
                (GMonomial(sign, 1), base_mask),
            ]
        lab = (labels >> src) & 1
        if lab == LABEL_X:
            return [(GMonomial(sign), base_mask | (1 << w1) | (1 << w2))]
        return [
            (GMonomial(sign), base_mask | (1 << w2)),
            (GMonomial(sign), base_mask | (1 << w1)),
            (GMonomial(sign, 1), base_mask),
        ]

    # column 0
    st0 = state(0)
    column = []
    for labels in range(1 << st0.n_circles):
        if st0.marked != st0.n_circles - 1 and (labels >> st0.marked) & 1:
            continue
        if labels >> st0.n_circles:
            continue
        if (labels >> st0.marked) & 1:
            continue
        column.append(gen_id(0, labels))

    import heapq

    def eliminate_between(cands):
        heap = []
        for s, t in cands:
            if out_.get(s, {}).get(t, GMonomial(0)).is_unit():
                g = gradings[s]
                heapq.heappush(heap, (g.i, g.q, s, t))
        dead = set()
        while heap:
            _, _, s, t = heapq.heappop(heap)
            if s in dead or t in dead or s not in out_:
                continue
            e = out_[s].get(t)
            if e is None or not e.is_unit():
                continue
            dead.add(s)
            dead.add(t)
            ins_t = [(x, m) for x, m in in_[t].items() if x != s and x not in dead]
            outs_s = [(z, m) for z, m in out_[s].items() if z != t and z not in dead]
            for z in list(out_[s]):
                in_[z].pop(s, None)
            for x in list(in_[s]):
                out_[x].pop(s, None)
            for z in list(out_[t]):
                in_[z].pop(t, None)
            for x in list(in_[t]):
                out_[x].pop(t, None)
            for k in (s, t):
                out_.pop(k, None)
                in_.pop(k, None)
                gens.pop(k, None)
            for x, d_m in ins_t:
                for z, f_m in outs_s:
                    corr = GMonomial(
                        -f_m.coeff * e.coeff * d_m.coeff, f_m.power + d_m.power
                    )
                    cur = out_[x].get(z)
                    new = corr if cur is None else cur + corr
                    if new:
                        out_[x][z] = new
                        in_[z][x] = new
                        if new.is_unit():
                            g = gradings[x]
                            heapq.heappush(heap, (g.i, g.q, x, z))
                    else:
                        out_[x].pop(z, None)
                        in_[z].pop(x, None)
        return dead

    for r in range(n):
        new_pairs = []
        for s in column:
            if s not in gens:
                continue
            v, labels = gens[s]
            for c in range(n):
                if (v >> c) & 1:
                    continue
                for mono, labels2 in edge_terms(v, labels, c):
                    t = gen_id(v | (1 << c), labels2)
                    add_entry(s, t, mono)
                    new_pairs.append((s, t))
        eliminate_between(new_pairs)
        column = sorted(
            k for k, (v, _) in gens.items() if bin(v).count("1") == r + 1
        )
        # free cached resolution states of the finished column
        states = {v: st for v, st in states.items() if bin(v).count("1") > r}

    order = sorted(gens)
    index = {k: j for j, k in enumerate(order)}
    cx = FreeComplex(
        [gradings[k] for k in order],
        {
            (index[s], index[t]): m
            for s in order
            for t, m in out_.get(s, {}).items()
        },
    )
    cx = cx.gaussian_eliminate()
    cx.assert_valid()
    return cx


# -- specializations and invariants of complexes ------------------------


def unreduced_from_reduced(cx: FreeComplex) -> FreeComplex:
    """Integral unreduced Khovanov complex: Z[G]{m} -> Z{m-1} + Z{m+1}.

    Each entry n G^k becomes n times the identity 2x2 block (k = 0),
    the strictly upper block with 2n (k = 1), or zero (k >= 2).
    """
    gens = []
    for g in cx.gens:
        gens.append((g.i, g.q - 1))
        gens.append((g.i, g.q + 1))
    entries = {}
    for (s, t), m in cx.entries.items():
        if m.power == 0:
            entries[(2 * s, 2 * t)] = GMonomial(m.coeff)
            entries[(2 * s + 1, 2 * t + 1)] = GMonomial(m.coeff)
        elif m.power == 1:
            entries[(2 * s + 1, 2 * t)] = GMonomial(2 * m.coeff)
    return FreeComplex(gens, entries)


def specialized_homology(cx: FreeComplex, spec: CoefficientSpec):
    """Homology table of the specialized complex.

    int_g0: {(i, q): (free rank, torsion)}; field_g1: {"total": d,
    "by_degree": {i: d_i}}; field_p: pawn/knight decomposition table.
    """
    if spec.mode == "int_g0":
        return {
            (g.i, g.q): v for g, v in integral_g0_table(cx).items()
        }
    if spec.mode == "field_g1":
        dims = g1_dimensions(cx, spec.p)
        return {"total": sum(dims.values()), "by_degree": dims}
    return field_decompose(cx, spec.p).table()


def s_invariant(cx: FreeComplex, p=0):
    """Rasmussen-type invariant over Q (p = 0) or F_p.

    Over the graded PID F[G] the complex splits into one pawn and
    knights; the pawn's quantum shift is the invariant.
    """
    dec = field_decompose(cx, p)
    if len(dec.pawns) != 1:
        raise RuntimeError(
            f"expected one pawn over F[G], found {len(dec.pawns)}; not a knot complex?"
        )
    return dec.pawns[0].q


def closed_surface_value(genus: int) -> GPolynomial:
    """Evaluation of a closed genus-g surface: 0 for even g, 2G^(g-1) odd."""
    if genus < 0:
        raise ValueError("genus must be nonnegative")
    if genus % 2 == 0:
        return GPolynomial()
    return GPolynomial((0,) * (genus - 1) + (2,))


# -- independent unreduced cube oracle ----------------------------------


def unreduced_cube_homology(pd: PDCode, cap=DEFAULT_GENERATOR_CAP):
    """Unreduced integral Khovanov homology straight from the cube.

    Independent of the Z[G] machinery: Frobenius algebra Z[X]/(X^2),
    no base point, no elimination; homology by Smith normal form per
    bidegree.  Intended as an oracle for unreduced_from_reduced.
    """
    n = len(pd.crossings)
    np_, nm = pd.n_plus, pd.n_minus
    if n == 0:
        return {(0, -1): (1, []), (0, 1): (1, [])}
    base = BasePoint(pd.min_edge())
    states = {v: resolve(pd, v, base) for v in range(1 << n)}
    if sum(1 << st.n_circles for st in states.values()) > cap:
        raise ResourceCapExceeded("unreduced cube too large")
    gens, gradings = [], []
    gid = {}
    for v in range(1 << n):
        st = states[v]
        r = bin(v).count("1")
        for labels in range(1 << st.n_circles):
            xs = bin(labels).count("1")
            ones = st.n_circles - xs
            gid[(v, labels)] = len(gens)
            gens.append((v, labels))
            gradings.append(Grading(r - nm, (ones - xs) + r + np_ - 2 * nm))
    entries = {}
    for v in range(1 << n):
        st = states[v]
        for c in range(n):
            if (v >> c) & 1:
                continue
            v2 = v | (1 << c)
            st2 = states[v2]
            sign = -1 if bin(v & ((1 << c) - 1)).count("1") % 2 else 1
            image = {}
            for e, circ in st.circle_of.items():
                image.setdefault(circ, set()).add(st2.circle_of[e])
            for labels in range(1 << st.n_circles):
                s_id = gid[(v, labels)]
                if st2.n_circles == st.n_circles - 1:
                    target_count = {}
                    for a2, im in image.items():
                        target_count.setdefault(next(iter(im)), []).append(a2)
                    tgt, (a, b) = next(
                        (t, s) for t, s in target_count.items() if len(s) == 2
                    )
                    la_, lb = (labels >> a) & 1, (labels >> b) & 1
                    if la_ and lb:
                        results = []  # X.X = 0
                    elif la_ or lb:
                        results = [LABEL_X]
                    else:
                        results = [LABEL_ONE]
                    for lab in results:
                        mask = 0
                        for a2, im in image.items():
                            if a2 in (a, b):
                                continue
                            if (labels >> a2) & 1:
                                mask |= 1 << next(iter(im))
                        if lab == LABEL_X:
                            mask |= 1 << tgt
                        key = (s_id, gid[(v2, mask)])
                        entries[key] = entries.get(key, 0) + sign
                else:
                    src, (w1, w2) = next(
                        (a2, tuple(sorted(im)))
                        for a2, im in image.items()
                        if len(im) == 2
                    )
                    mask = 0
                    for a2, im in image.items():
                        if a2 == src:
                            continue
                        if (labels >> a2) & 1:
                            mask |= 1 << next(iter(im))
                    if (labels >> src) & 1:
                        targets = [mask | (1 << w1) | (1 << w2)]
                    else:
                        targets = [mask | (1 << w1), mask | (1 << w2)]
                    for mask2 in targets:
                        key = (s_id, gid[(v2, mask2)])
                        entries[key] = entries.get(key, 0) + sign
    cx = FreeComplex(
        gradings, {k: GMonomial(c) for k, c in entries.items() if c}
    )
    return {(g.i, g.q): v for g, v in integral_g0_table(cx).items()}
