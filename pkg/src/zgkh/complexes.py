"""Graded chain complexes of free shifted Z[G]-modules.

A complex is a finite list of generators, each a rank-one free summand
Z[G]{q} sitting in homological degree i, together with a sparse
differential whose entries are single monomials.  Homogeneity (the
entry c*G^k may only run from quantum degree q to q + 2k one homological
degree up) is what keeps entries monomial and every solver integral.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import intlinalg as la
from .ring import GMonomial


class Grading(NamedTuple):
    i: int  # homological degree
    q: int  # quantum degree


class FreeComplex:
    """Free graded complex with monomial differential entries.

    entries maps (source index, target index) -> GMonomial, target one
    homological degree above the source.
    """

    __slots__ = ("gens", "entries")

    def __init__(self, gens, entries=None):
        self.gens = [Grading(*g) for g in gens]
        self.entries = {}
        for (s, t), m in (entries or {}).items():
            if not isinstance(m, GMonomial):
                m = GMonomial(*m)
            if m:
                self.entries[(s, t)] = m

    def __len__(self):
        return len(self.gens)

    def __eq__(self, other):
        return (
            isinstance(other, FreeComplex)
            and self.gens == other.gens
            and self.entries == other.entries
        )

    def copy(self):
        return FreeComplex(list(self.gens), dict(self.entries))

    # -- validation ----------------------------------------------------

    def validate(self):
        """Return a list of invariant violations (empty means ok)."""
        bad = []
        n = len(self.gens)
        for (s, t), m in self.entries.items():
            if not (0 <= s < n and 0 <= t < n):
                bad.append(f"entry ({s},{t}) out of range")
                continue
            gs, gt = self.gens[s], self.gens[t]
            if gt.i != gs.i + 1:
                bad.append(f"entry ({s},{t}): homological step {gs.i}->{gt.i}")
            if gt.q != gs.q + 2 * m.power:
                bad.append(
                    f"entry ({s},{t}): {m} maps q={gs.q} to q={gt.q}, "
                    f"expected q={gs.q + 2 * m.power}"
                )
        square = {}
        for (s, t), m1 in self.entries.items():
            for (t2, u), m2 in self.entries.items():
                if t2 == t:
                    key = (s, u)
                    square[key] = square.get(key, 0) + m1.coeff * m2.coeff
        for (s, u), c in square.items():
            if c != 0:
                bad.append(f"d^2 != 0 from generator {s} to {u}")
        return bad

    def assert_valid(self):
        bad = self.validate()
        if bad:
            raise ValueError("invalid complex: " + "; ".join(bad[:5]))
        return self

    # -- basic constructions -------------------------------------------

    def shift(self, di=0, dq=0):
        return FreeComplex(
            [(g.i + di, g.q + dq) for g in self.gens], dict(self.entries)
        )

    def direct_sum(self, other):
        off = len(self.gens)
        gens = list(self.gens) + list(other.gens)
        entries = dict(self.entries)
        for (s, t), m in other.entries.items():
            entries[(s + off, t + off)] = m
        return FreeComplex(gens, entries)

    def tensor(self, other):
        """Tensor product with the Koszul sign on second-factor entries."""
        nb = len(other.gens)
        gens = [
            (ga.i + gb.i, ga.q + gb.q) for ga in self.gens for gb in other.gens
        ]
        entries = {}
        for (s, t), m in self.entries.items():
            for b in range(nb):
                entries[(s * nb + b, t * nb + b)] = m
        for (s, t), m in other.entries.items():
            for a, ga in enumerate(self.gens):
                sign = -1 if ga.i % 2 else 1
                entries[(a * nb + s, a * nb + t)] = GMonomial(sign * m.coeff, m.power)
        return FreeComplex(gens, entries)

    def dual(self):
        gens = [(-g.i, -g.q) for g in self.gens]
        entries = {(t, s): m for (s, t), m in self.entries.items()}
        return FreeComplex(gens, entries)

    # -- Gaussian elimination ------------------------------------------

    def gaussian_eliminate(self):
        """Cancel all unit entries, homotopy-preserving.

        Pivots are taken in increasing (homological degree, quantum
        degree, source index, target index) order so output is
        deterministic.  The correction term is the c - f e^{-1} d of the
        elimination lemma.
        """
        out_ = {s: {} for s in range(len(self.gens))}
        in_ = {t: {} for t in range(len(self.gens))}
        for (s, t), m in self.entries.items():
            out_[s][t] = m
            in_[t][s] = m

        def key(s, t):
            g = self.gens[s]
            return (g.i, g.q, s, t)

        heap = [key(s, t) for (s, t), m in self.entries.items() if m.is_unit()]
        heapq.heapify(heap)
        dead = set()
        while heap:
            _, _, s, t = heapq.heappop(heap)
            if s in dead or t in dead:
                continue
            e = out_[s].get(t)
            if e is None or not e.is_unit():
                continue
            dead.add(s)
            dead.add(t)
            ins_t = [(x, m) for x, m in in_[t].items() if x != s and x not in dead]
            outs_s = [(z, m) for z, m in out_[s].items() if z != t and z not in dead]
            # detach s and t completely
            for z in list(out_[s]):
                in_[z].pop(s, None)
            for x in list(in_[s]):
                out_[x].pop(s, None)
            for z in list(out_[t]):
                in_[z].pop(t, None)
            for x in list(in_[t]):
                out_[x].pop(t, None)
            out_[s].clear()
            in_[s].clear()
            out_[t].clear()
            in_[t].clear()
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
                            heapq.heappush(heap, key(x, z))
                    else:
                        out_[x].pop(z, None)
                        in_[z].pop(x, None)
        keep = [g for g in range(len(self.gens)) if g not in dead]
        index = {g: k for k, g in enumerate(keep)}
        gens = [self.gens[g] for g in keep]
        entries = {}
        for s in keep:
            for t, m in out_[s].items():
                entries[(index[s], index[t])] = m
        return FreeComplex(gens, entries)

    # -- graded pieces --------------------------------------------------

    def hdegs(self):
        return sorted({g.i for g in self.gens})

    def qrange(self):
        qs = [g.q for g in self.gens]
        return (min(qs), max(qs)) if qs else (0, 0)

    def chain_basis(self, i, q):
        """Generators spanning the quantum-degree-q piece at homological i.

        Generator g contributes the basis vector G^((q_g - q)/2) * g, so
        it belongs iff q_g >= q with matching parity.
        """
        return [
            k
            for k, g in enumerate(self.gens)
            if g.i == i and g.q >= q and (g.q - q) % 2 == 0
        ]

    def block_matrix(self, i, q, rows=None, cols=None):
        """Integer matrix of d between the (i, q)- and (i+1, q)-pieces."""
        if cols is None:
            cols = self.chain_basis(i, q)
        if rows is None:
            rows = self.chain_basis(i + 1, q)
        rowpos = {g: r for r, g in enumerate(rows)}
        A = la.zeros(len(rows), len(cols))
        for c, s in enumerate(cols):
            for t, m in self._out(s):
                r = rowpos.get(t)
                if r is not None:
                    A[r, c] = m.coeff
        return A

    def _out(self, s):
        return [(t, m) for (ss, t), m in self.entries.items() if ss == s]

    # -- serialization ---------------------------------------------------

    def to_json(self):
        return {
            "gens": [[g.i, g.q] for g in self.gens],
            "entries": sorted(
                [s, t, m.coeff, m.power] for (s, t), m in self.entries.items()
            ),
        }

    @staticmethod
    def from_json(obj):
        return FreeComplex(
            [tuple(g) for g in obj["gens"]],
            {(s, t): GMonomial(c, k) for s, t, c, k in obj["entries"]},
        )

    def __repr__(self):
        return f"FreeComplex({len(self.gens)} gens, {len(self.entries)} entries)"


def pawn(i=0, q=0):
    return FreeComplex([(i, q)])

def knight(z: GMonomial, i=0, q=0):
    """Two generators joined by z, quantum shift forced by homogeneity."""
    if not z:
        raise ValueError("knight entry must be nonzero")
    return FreeComplex([(i, q), (i + 1, q + 2 * z.power)], {(0, 1): z})


def empty_complex():
    return FreeComplex([])


# -- homology ----------------------------------------------------------


@dataclass
class HomologyGroup:
    """H at one grading: free rank, torsion orders, and chosen generators.

    Generators are chain vectors over `basis` (generator indices of the
    ambient complex); `orders` lists 0 for free classes, n > 1 for
    torsion classes, aligned with `class_vectors` columns.
    """

    grading: Grading
    free_rank: int
    torsion: list
    basis: list = field(default_factory=list)
    class_vectors: list = field(default_factory=list)  # list of np vectors
    orders: list = field(default_factory=list)

    def is_zero(self):
        return self.free_rank == 0 and not self.torsion

    def group_str(self):
        parts = ["Z"] * self.free_rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def _solve_in_columns(Z, B):
    """X with Z @ X = B (each column), assuming solutions exist."""
    X = la.zeros(Z.shape[1], B.shape[1])
    for j in range(B.shape[1]):
        x = la.solve(Z, B[:, j])
        if x is None:
            raise ValueError("image not contained in kernel (d^2 != 0?)")
        X[:, j] = x
    return X


def homology_at(cx: FreeComplex, i, q):
    """Homology of the quantum-degree-q piece at homological degree i."""
    cur = cx.chain_basis(i, q)
    prv = cx.chain_basis(i - 1, q)
    A = cx.block_matrix(i, q, cols=cur)
    B = cx.block_matrix(i - 1, q, rows=cur, cols=prv)
    Z = la.kernel_basis(A)
    if Z.shape[1] == 0:
        return HomologyGroup(Grading(i, q), 0, [], cur, [], [])
    X = _solve_in_columns(Z, B)
    U, S, _, Uinv, _ = la.smith_normal_form(X)
    gen_mat = Z @ Uinv
    r = min(S.shape)
    orders, vectors = [], []
    for j in range(Z.shape[1]):
        s = S[j, j] if j < r else 0
        if s == 1:
            continue
        orders.append(int(s))
        vectors.append(gen_mat[:, j])
    free_rank = sum(1 for o in orders if o == 0)
    torsion = sorted(o for o in orders if o > 1)
    return HomologyGroup(Grading(i, q), free_rank, torsion, cur, vectors, orders)


def g_action_matrix(cx: FreeComplex, source: HomologyGroup, target: HomologyGroup):
    """Matrix of multiplication by G from H(i, q) to H(i, q-2).

    Rows index target classes; entries of torsion rows are reduced
    modulo the class order.
    """
    if not source.class_vectors or not target.class_vectors:
        return la.zeros(len(target.class_vectors), len(source.class_vectors))
    i, q = source.grading
    pos = {g: k for k, g in enumerate(target.basis)}
    # target coordinates: solve through the target's class basis
    tgt_gen_mat = np.stack(target.class_vectors, axis=1)
    prv = cx.chain_basis(i - 1, q - 2)
    Bprev = cx.block_matrix(i - 1, q - 2, rows=target.basis, cols=prv)
    out = la.zeros(len(target.class_vectors), len(source.class_vectors))
    for c, v in enumerate(source.class_vectors):
        w = la.zeros(len(target.basis), 1).reshape(len(target.basis))
        for k, g in enumerate(source.basis):
            w[pos[g]] = v[k]
        # express w as class combination + boundary
        aug = np.concatenate([tgt_gen_mat, Bprev], axis=1)
        sol = la.solve(aug, w)
        if sol is None:
            raise ValueError("G-action image not recognized in homology")
        for r in range(len(target.class_vectors)):
            val = int(sol[r])
            if target.orders[r] > 1:
                val %= target.orders[r]
            out[r, c] = val
    return out


# -- specializations ----------------------------------------------------


def integral_g0_table(cx: FreeComplex):
    """Reduced integral Khovanov homology: set G = 0, Smith per grading.

    Returns {(i, q): (free_rank, [torsion orders])} with zero groups
    omitted.
    """
    by_grading = {}
    for k, g in enumerate(cx.gens):
        by_grading.setdefault(g, []).append(k)
    table = {}
    for g, cols in by_grading.items():
        nxt = by_grading.get(Grading(g.i + 1, g.q), [])
        prv = by_grading.get(Grading(g.i - 1, g.q), [])
        A = la.zeros(len(nxt), len(cols))
        npos = {t: r for r, t in enumerate(nxt)}
        B = la.zeros(len(cols), len(prv))
        cpos = {t: r for r, t in enumerate(cols)}
        for (s, t), m in cx.entries.items():
            if m.power != 0:
                continue
            if s in cpos and t in npos:
                A[npos[t], cpos[s]] = m.coeff
            if t in cpos and s in prv:
                B[cpos[t], prv.index(s)] = m.coeff
        Z = la.kernel_basis(A)
        if Z.shape[1] == 0:
            continue
        X = _solve_in_columns(Z, B)
        free, tors = la.cokernel_invariants(X)
        if free or tors:
            table[g] = (free, sorted(tors))
    return dict(sorted(table.items()))


def g0_total_rank(cx: FreeComplex):
    return sum(fr for fr, _ in integral_g0_table(cx).values())


def g0_euler_poly(cx: FreeComplex):
    """Graded Euler characteristic {q: coefficient} of the G=0 homology."""
    poly = {}
    for (i, q), (fr, _) in integral_g0_table(cx).items():
        poly[q] = poly.get(q, 0) + (-1) ** i * fr
    return {q: c for q, c in sorted(poly.items()) if c}


def determinant_from_table(table):
    """|sum of (-1)^i * (-1)^(q/2) * rank| over a reduced integral table."""
    total = 0
    for (i, q), (fr, _) in table.items():
        total += (-1) ** i * (-1) ** (q // 2) * fr
    return abs(total)


def is_thin(cx: FreeComplex):
    """Torsion-free reduced integral homology in a single delta-degree."""
    table = integral_g0_table(cx)
    deltas = set()
    for (i, q), (fr, tors) in table.items():
        if tors:
            return False
        if fr:
            deltas.add(q - 2 * i)
    return len(deltas) <= 1


def g1_dimensions(cx: FreeComplex, p=0):
    """Dimensions of homology after G -> 1, over Q (p=0) or F_p."""
    by_i = {}
    for k, g in enumerate(cx.gens):
        by_i.setdefault(g.i, []).append(k)
    ranks = {}
    for i in sorted(by_i):
        cols = by_i[i]
        nxt = by_i.get(i + 1, [])
        A = la.zeros(len(nxt), len(cols))
        npos = {t: r for r, t in enumerate(nxt)}
        cpos = {s: c for c, s in enumerate(cols)}
        for (s, t), m in cx.entries.items():
            if s in cpos and t in npos:
                A[npos[t], cpos[s]] += m.coeff
        ranks[i] = la.rank(A) if p == 0 else la.rank_mod_p(A, p)
    dims = {}
    for i, cols in by_i.items():
        d = len(cols) - ranks.get(i, 0) - ranks.get(i - 1, 0)
        if d:
            dims[i] = d
    return dims


@dataclass
class FieldDecomposition:
    """Pawn/knight normal form of a complex over the graded PID F[G]."""

    p: int  # 0 for Q
    pawns: list  # [Grading]
    knights: list  # [(Grading, power)] source grading and G-power

    def sorted(self):
        return FieldDecomposition(
            self.p, sorted(self.pawns), sorted(self.knights)
        )

    def table(self):
        return {
            "pawns": [[g.i, g.q] for g in sorted(self.pawns)],
            "knights": [[g.i, g.q, k] for g, k in sorted(self.knights)],
        }


def field_decompose(cx: FreeComplex, p=0):
    """Decompose over F[G], F = Q (p=0) or F_p, into pawns and knights.

    F[G] is a graded PID, so repeatedly pivoting on the entry whose
    G-power is least (such an entry is a unit times G^k) and clearing
    its row and column splits off one knight per pivot (or a
    contractible pair when k = 0).  Powers never need storing: the
    power of an entry from generator s to t is (q_t - q_s)/2.

    Row operations at level i are basis changes of C_{i+1} and are
    propagated to d_{i+1}; the matching column operations on d_{i-1}
    act on an already fully reduced (zero) matrix, so they are skipped.
    """

    def norm(c):
        return Fraction(c) if p == 0 else c % p

    def inv(c):
        return 1 / Fraction(c) if p == 0 else pow(int(c) % p, -1, p)

    mats = {}  # i -> {(t, s): coeff in F} for d: C_i -> C_{i+1}
    for (s, t), m in cx.entries.items():
        c = norm(m.coeff)
        if c:
            mats.setdefault(cx.gens[s].i, {})[(t, s)] = c

    def power(t, s):
        return (cx.gens[t].q - cx.gens[s].q) // 2

    paired = set()
    knights = []
    for i in sorted(mats):
        M = mats[i]
        while M:
            (t0, s0) = min(M, key=lambda ts: (power(*ts), ts))
            c0 = M[(t0, s0)]
            k0 = power(t0, s0)
            lam0 = inv(c0)
            col = [(t, c) for (t, s), c in M.items() if s == s0 and t != t0]
            row_t0 = [(s, c) for (t, s), c in M.items() if t == t0]
            # clear column s0 with row ops row_t -= lam * row_t0
            for t, c in col:
                lam = norm(c * lam0)
                for s1, c1 in row_t0:
                    new = norm(M.get((t, s1), norm(0)) - lam * c1)
                    if new:
                        M[(t, s1)] = new
                    else:
                        M.pop((t, s1), None)
                # inverse column op on the next differential
                nxt = mats.get(i + 1)
                if nxt:
                    for (u, tt), cu in list(nxt.items()):
                        if tt == t:
                            new = norm(nxt.get((u, t0), norm(0)) + lam * cu)
                            if new:
                                nxt[(u, t0)] = new
                            else:
                                nxt.pop((u, t0), None)
            # column s0 and row t0 now hold only the pivot; d^2 = 0 has
            # already forced column t0 of the next differential to zero
            nxt = mats.get(i + 1)
            if nxt:
                leftovers = [key for key in nxt if key[1] == t0]
                if leftovers:
                    raise AssertionError("d^2 != 0 during field decomposition")
            for s, _ in row_t0:
                M.pop((t0, s), None)
            M.pop((t0, s0), None)
            paired.add(s0)
            paired.add(t0)
            if k0 > 0:
                knights.append((cx.gens[s0], k0))
    pawns = [g for k, g in enumerate(cx.gens) if k not in paired]
    return FieldDecomposition(p, pawns, knights).sorted()
