"""Chain maps between free Z[G]-complexes, and the linear solvers.

Because differentials are bihomogeneous, the space of ungraded chain
maps splits over bidegrees (homological offset, quantum offset), and in
a fixed bidegree every matrix entry is a monomial whose G-power is
forced by the gradings of its endpoints.  Commutation and nullhomotopy
conditions then become finite integer linear systems, solved exactly by
Smith reduction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import intlinalg as la
from .complexes import FreeComplex
from .ring import GMonomial, GPolynomial


class ChainMap:
    """Map between complexes with GPolynomial matrix entries."""

    __slots__ = ("src", "dst", "entries")

    def __init__(self, src: FreeComplex, dst: FreeComplex, entries=None):
        self.src = src
        self.dst = dst
        self.entries = {}
        for key, val in (entries or {}).items():
            if isinstance(val, GMonomial):
                val = val.to_poly()
            if val:
                self.entries[key] = val

    def __bool__(self):
        return any(self.entries.values())

    def __add__(self, other):
        out = dict(self.entries)
        for key, val in other.entries.items():
            new = out.get(key, GPolynomial()) + val
            if new:
                out[key] = new
            else:
                out.pop(key, None)
        return ChainMap(self.src, self.dst, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, factor):
        if isinstance(factor, int):
            factor = GPolynomial.constant(factor)
        return ChainMap(
            self.src, self.dst, {k: factor * v for k, v in self.entries.items()}
        )

    def then(self, other: "ChainMap") -> "ChainMap":
        """Composite other o self (apply self first)."""
        out = {}
        by_src = {}
        for (m, t), val in other.entries.items():
            by_src.setdefault(m, []).append((t, val))
        for (s, m), v1 in self.entries.items():
            for t, v2 in by_src.get(m, ()):
                key = (s, t)
                new = out.get(key, GPolynomial()) + v2 * v1
                if new:
                    out[key] = new
                else:
                    out.pop(key, None)
        return ChainMap(self.src, other.dst, out)

    def __eq__(self, other):
        return (
            isinstance(other, ChainMap)
            and self.entries == other.entries
        )

    def commutes(self):
        """d_dst o f - f o d_src == 0, the (ungraded) chain map condition."""
        lhs = self.then(differential(self.dst))
        rhs = differential(self.src).then(self)
        return (lhs - rhs).is_zero()

    def is_zero(self):
        return not self

    def to_json(self):
        return sorted(
            [s, t, list(v.coeffs)] for (s, t), v in self.entries.items()
        )

    def __repr__(self):
        return f"ChainMap({len(self.entries)} entries)"


def differential(c: FreeComplex) -> ChainMap:
    return ChainMap(c, c, {k: m.to_poly() for k, m in c.entries.items()})


def identity_map(c: FreeComplex, power=0, coeff=1) -> ChainMap:
    """coeff * G^power times the identity."""
    return ChainMap(
        c, c, {(g, g): GMonomial(coeff, power) for g in range(len(c.gens))}
    )


def block_sum(maps):
    """Direct sum of chain maps along direct sums of their (co)domains."""
    src = maps[0].src
    dst = maps[0].dst
    for f in maps[1:]:
        src = src.direct_sum(f.src)
        dst = dst.direct_sum(f.dst)
    out = {}
    soff = toff = 0
    for f in maps:
        for (s, t), v in f.entries.items():
            out[(s + soff, t + toff)] = v
        soff += len(f.src.gens)
        toff += len(f.dst.gens)
    return ChainMap(src, dst, out)


def _forced_power(src, dst, s, t, q_off):
    k2 = dst.gens[t].q - src.gens[s].q - q_off
    if k2 % 2 or k2 < 0:
        return None
    return k2 // 2


def chain_map_unknowns(src, dst, h_off, q_off):
    """Pairs (s, t) admitting a nonzero entry in this bidegree."""
    pairs = []
    for s, gs in enumerate(src.gens):
        for t, gt in enumerate(dst.gens):
            if gt.i != gs.i + h_off:
                continue
            if _forced_power(src, dst, s, t, q_off) is not None:
                pairs.append((s, t))
    return pairs


def solve_chain_map(src, dst, h_off=0, q_off=0):
    """Basis of the lattice of chain maps src -> dst in one bidegree.

    Entries are monomials of grading-forced power; the commutation
    d o f = f o d is a homogeneous integer system whose kernel basis is
    returned as a list of ChainMaps.
    """
    pairs = chain_map_unknowns(src, dst, h_off, q_off)
    if not pairs:
        return []
    pos = {p: k for k, p in enumerate(pairs)}
    # equations indexed by (s in src, u in dst) one homological step up
    eq_index = {}
    rows = []

    def eq_row(key):
        if key not in eq_index:
            eq_index[key] = len(rows)
            rows.append([0] * len(pairs))
        return rows[eq_index[key]]

    for (s, t), var in pos.items():
        for (t2, u), m in dst.entries.items():
            if t2 == t:
                eq_row((s, u))[var] += m.coeff
        for (x, s2), m in src.entries.items():
            if s2 == s:
                eq_row((x, t))[var] -= m.coeff
    A = la.intmat(rows) if rows else la.zeros(0, len(pairs))
    K = la.kernel_basis(A)
    basis = []
    for j in range(K.shape[1]):
        comp = {}
        for (s, t), var in pos.items():
            c = int(K[var, j])
            if c:
                k = _forced_power(src, dst, s, t, q_off)
                comp[(s, t)] = GMonomial(c, k)
        basis.append(ChainMap(src, dst, comp))
    return basis


def solve_chain_map_ungraded(src, dst):
    """Bases for all bidegrees carrying possibly nonzero chain maps.

    Quantum offsets below the stabilization point are G-multiples of
    offsets above it, so only offsets down to min(dst q) - max(src q)
    are enumerated.  Returns {(h_off, q_off): [ChainMap, ...]}.
    """
    if not src.gens or not dst.gens:
        return {}
    h_offs = range(
        min(g.i for g in dst.gens) - max(g.i for g in src.gens),
        max(g.i for g in dst.gens) - min(g.i for g in src.gens) + 1,
    )
    q_min = min(g.q for g in dst.gens) - max(g.q for g in src.gens)
    q_max = max(g.q for g in dst.gens) - min(g.q for g in src.gens)
    out = {}
    for h in h_offs:
        for q in range(q_min, q_max + 1):
            basis = solve_chain_map(src, dst, h, q)
            if basis:
                out[(h, q)] = basis
    return out


@dataclass
class Obstruction:
    """Certificate that an integer system A x = b has no solution.

    witness @ A == 0 mod modulus while witness @ b != 0 mod modulus
    (modulus 0 means over Z).  Row labels tie equations back to
    generator pairs.
    """

    bidegree: tuple
    row_labels: list
    witness: list
    modulus: int
    _system: tuple = None

    def verify(self):
        A, b = self._system
        w = np.array(self.witness, dtype=object)
        wa = w @ A
        wb = int(w @ b)
        if self.modulus == 0:
            return all(v == 0 for v in wa) and wb != 0
        return all(v % self.modulus == 0 for v in wa) and wb % self.modulus != 0

    def to_json(self):
        return {
            "bidegree": list(self.bidegree),
            "witness": [int(w) for w in self.witness],
            "modulus": self.modulus,
        }


def _bidegree_components(phi: ChainMap):
    comps = {}
    src, dst = phi.src, phi.dst
    for (s, t), poly in phi.entries.items():
        for mono in poly.monomials():
            j = dst.gens[t].i - src.gens[s].i
            d = dst.gens[t].q - src.gens[s].q - 2 * mono.power
            comps.setdefault((j, d), {})
            cur = comps[(j, d)].get((s, t), GMonomial(0))
            comps[(j, d)][(s, t)] = cur + mono
    return comps


def solve_nullhomotopy(c: FreeComplex, phi: ChainMap):
    """Find h with h o d + d o h = phi, or a nonexistence certificate.

    phi must be an ungraded chain map c -> c.  The solve splits over
    bidegrees of phi; failure of any component kills all of phi since
    homotopies decompose bihomogeneously as well.

    Returns (h, None) on success, (None, Obstruction) on failure.
    """
    assert phi.commutes(), "phi is not a chain map"
    total = ChainMap(c, c, {})
    for (j, delta), comp in _bidegree_components(phi).items():
        pairs = chain_map_unknowns(c, c, j - 1, delta)
        pos = {p: k for k, p in enumerate(pairs)}
        eq_index, rows, rhs = {}, [], []

        def eq_row(key):
            if key not in eq_index:
                eq_index[key] = len(rows)
                rows.append([0] * len(pairs))
                rhs.append(0)
            return rows[eq_index[key]]

        # h o d contributions: d(s->t) then h(t->u)
        for (t, u), var in pos.items():
            for (s, t2), m in c.entries.items():
                if t2 == t:
                    eq_row((s, u))[var] += m.coeff
        # d o h contributions: h(s->m) then d(m->u)
        for (s, m_), var in pos.items():
            for (m2, u), m in c.entries.items():
                if m2 == m_:
                    eq_row((s, u))[var] += m.coeff
        for (s, u), mono in comp.items():
            eq_row((s, u))
            rhs[eq_index[(s, u)]] = mono.coeff
        A = la.intmat(rows) if rows else la.zeros(0, len(pairs))
        b = np.array(rhs, dtype=object)
        x, cert = la.solve_with_certificate(A, b)
        if x is None:
            w, mod = cert
            labels = sorted(eq_index, key=eq_index.get)
            return None, Obstruction(
                (j - 1, delta), labels, [int(v) for v in w], int(mod), (A, b)
            )
        comp_entries = {}
        for (s, t), var in pos.items():
            v = int(x[var])
            if v:
                k = _forced_power(c, c, s, t, delta)
                comp_entries[(s, t)] = GMonomial(v, k)
        total = total + ChainMap(c, c, comp_entries)
    return total, None


def is_nullhomotopy(c: FreeComplex, h: ChainMap, phi: ChainMap):
    """Exact check of h o d + d o h == phi."""
    d = differential(c)
    return (d.then(h) + h.then(d) - phi).is_zero()
