"""Exact arithmetic in the graded ring Z[G] (deg G = -2) and its quotients.

Monomials c*G^k are the workhorse: every differential entry of a free
graded complex is forced to be a single monomial by homogeneity, so the
monomial type carries almost all of the ring traffic.  Full polynomials
appear in surface evaluation and in the two-object tangle category.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class GMonomial:
    """An integer multiple of a power of G.  The zero monomial is (0, 0)."""

    coeff: int
    power: int = 0

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("negative G-power")
        if self.coeff == 0 and self.power != 0:
            object.__setattr__(self, "power", 0)

    def __bool__(self):
        return self.coeff != 0

    def __mul__(self, other: "GMonomial") -> "GMonomial":
        return GMonomial(self.coeff * other.coeff, self.power + other.power)

    def __neg__(self):
        return GMonomial(-self.coeff, self.power)

    def __add__(self, other: "GMonomial") -> "GMonomial":
        """Sum, defined only when the result is again a monomial."""
        if self.coeff == 0:
            return other
        if other.coeff == 0:
            return self
        if self.power != other.power:
            raise ValueError("sum of monomials of different degree")
        return GMonomial(self.coeff + other.coeff, self.power)

    @property
    def degree(self):
        """Quantum degree, or None for the zero monomial."""
        return None if self.coeff == 0 else -2 * self.power

    def is_unit(self):
        return self.coeff in (1, -1) and self.power == 0

    def divides(self, other: "GMonomial") -> bool:
        """True iff other = self * m for some monomial m."""
        if self.coeff == 0:
            raise ValueError("division by zero monomial")
        if other.coeff == 0:
            return True
        return other.power >= self.power and other.coeff % self.coeff == 0

    def to_poly(self) -> "GPolynomial":
        if self.coeff == 0:
            return GPolynomial(())
        return GPolynomial((0,) * self.power + (self.coeff,))

    def __str__(self):
        if self.power == 0:
            return str(self.coeff)
        return f"{self.coeff}*G^{self.power}"

    def to_json(self):
        return {"c": self.coeff, "k": self.power}

    @staticmethod
    def from_json(obj):
        return GMonomial(obj["c"], obj["k"])


ZERO = GMonomial(0)
ONE = GMonomial(1)
G = GMonomial(1, 1)


def G_power(k, coeff=1):
    return GMonomial(coeff, k)


class GPolynomial:
    """Element of Z[G], stored as a coefficient tuple indexed by G-power."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        coeffs = tuple(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        self.coeffs = coeffs

    @staticmethod
    def constant(c):
        return GPolynomial((c,)) if c else GPolynomial(())

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, GPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return GPolynomial(x + y for x, y in zip(a, b))

    def __neg__(self):
        return GPolynomial(-x for x in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return GPolynomial(other * x for x in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return GPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return GPolynomial(out)

    __rmul__ = __mul__

    def times_G(self, k=1):
        if not self.coeffs:
            return self
        return GPolynomial((0,) * k + self.coeffs)

    def monomials(self):
        return [GMonomial(c, k) for k, c in enumerate(self.coeffs) if c]

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(str(m) for m in self.monomials())

    def __repr__(self):
        return f"GPolynomial({self.coeffs!r})"


@dataclass(frozen=True)
class CoefficientSpec:
    """Target of a coefficient specialization.

    mode "int_g0"   : Z, G -> 0
    mode "field_g1" : G -> 1 then reduce mod p (p = 0 keeps Q)
    mode "field_p"  : F_p[G], reduce coefficients mod p (p = 0 keeps Q[G])
    """

    mode: str
    p: int = 0

    def __post_init__(self):
        if self.mode not in ("int_g0", "field_g1", "field_p"):
            raise ValueError(f"unknown specialization mode {self.mode!r}")
        if self.mode != "int_g0" and self.p != 0 and not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def label(self):
        if self.mode == "int_g0":
            return "Z[G->0]"
        field = "Q" if self.p == 0 else f"F{self.p}"
        return f"{field}[G->1]" if self.mode == "field_g1" else f"{field}[G]"


INTEGERS_G_ZERO = CoefficientSpec("int_g0")


def field_g_one(p=0):
    return CoefficientSpec("field_g1", p)


def field_p_graded(p=0):
    return CoefficientSpec("field_p", p)


def specialize(poly: GPolynomial, spec: CoefficientSpec):
    """Apply the ring homomorphism described by spec to a polynomial.

    int_g0 and field_g1 return a scalar (int, residue, or Fraction);
    field_p returns a coefficient tuple over the target field.
    """
    cs = poly.coeffs
    if spec.mode == "int_g0":
        return cs[0] if cs else 0
    if spec.mode == "field_g1":
        total = sum(cs)
        if spec.p == 0:
            return Fraction(total)
        return total % spec.p
    if spec.p == 0:
        return tuple(Fraction(c) for c in cs)
    out = tuple(c % spec.p for c in cs)
    while out and out[-1] == 0:
        out = out[:-1]
    return out


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_power_root(n):
    """For n = p^j (j >= 1) return p, else None."""
    n = abs(n)
    if n < 2:
        return None
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            return p if n == 1 else None
        p += 1
    return n
