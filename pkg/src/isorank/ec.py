"""Exact arithmetic for elliptic curves over Q.

Rationals are :class:`fractions.Fraction`. A rational point is either ``None``
(the point at infinity) or a pair ``(x, y)`` of Fractions.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
import re

from . import arith
from .errors import FactorizationIncomplete, ParseError, PointNotOnCurve, SingularModel, ZeroTwist

INFINITY = None


@dataclass(frozen=True)
class WeierstrassModel:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    @property
    def ainvs(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def __str__(self):
        return "[" + ",".join(str(a) for a in self.ainvs) + "]"

    @classmethod
    def parse(cls, text):
        """Parse the bracket form ``[a1,a2,a3,a4,a6]`` (spaces allowed)."""
        m = re.fullmatch(r"\s*\[([^\]]*)\]\s*", text)
        if not m:
            raise ParseError(f"not a bracket model: {text!r}")
        parts = [s.strip() for s in m.group(1).split(",")]
        if len(parts) != 5:
            raise ParseError(f"expected 5 a-invariants, got {len(parts)}")
        try:
            return cls(*(int(s) for s in parts))
        except ValueError:
            raise ParseError(f"non-integer a-invariant in {text!r}") from None


@dataclass(frozen=True)
class ShortModel:
    A: int
    B: int

    def to_weierstrass(self):
        return WeierstrassModel(0, 0, 0, self.A, self.B)

    def __str__(self):
        return str(self.to_weierstrass())


@dataclass(frozen=True)
class CurveInvariants:
    b2: int
    b4: int
    b6: int
    b8: int
    c4: int
    c6: int
    disc: int
    j: Fraction


def as_weierstrass(model):
    if isinstance(model, ShortModel):
        return model.to_weierstrass()
    return model


def b_invariants(model):
    a1, a2, a3, a4, a6 = as_weierstrass(model).ainvs
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def discriminant(model):
    b2, b4, b6, b8 = b_invariants(model)
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def compute_invariants(model):
    b2, b4, b6, b8 = b_invariants(model)
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    if disc == 0:
        raise SingularModel(f"{as_weierstrass(model)} has zero discriminant")
    return CurveInvariants(b2, b4, b6, b8, c4, c6, disc, Fraction(c4**3, disc))


def j_invariant(model):
    return compute_invariants(model).j


def quadratic_twist(model, D):
    """y^2 = x^3 + A D^2 x + B D^3."""
    if D == 0:
        raise ZeroTwist("twist by D = 0")
    return ShortModel(model.A * D * D, model.B * D**3)


def short_form(model):
    """The c-invariant short model (A, B) = (-27 c4, -54 c6); same j, not minimal."""
    inv = compute_invariants(model)
    return ShortModel(-27 * inv.c4, -54 * inv.c6)


def twist(model, D):
    """Minimal model of the quadratic twist of a long model by D."""
    return minimal_model(quadratic_twist(short_form(model), D).to_weierstrass())


def naive_height(q):
    q = Fraction(q)
    return max(abs(q.numerator), q.denominator)


def rationals_of_height(H):
    """All rationals a/b in lowest terms with max(|a|, b) <= H.

    Ordered by denominator, then numerator.
    """
    for b in range(1, H + 1):
        for a in range(-H, H + 1):
            if gcd(a, b) == 1:
                yield Fraction(a, b)


def count_rationals_of_height(H):
    """1 + 2 * sum_{b<=H} #{1 <= a <= H : gcd(a, b) = 1}, computed from totients."""
    if H < 1:
        return 0
    phi = list(range(H + 1))
    for p in range(2, H + 1):
        if phi[p] == p:
            for k in range(p, H + 1, p):
                phi[k] -= phi[k] // p
    # pairs (a, b) with 1 <= a, b <= H coprime = 2 * sum_{k<=H} phi(k) - 1
    coprime = 2 * sum(phi[1:]) - 1
    return 1 + 2 * coprime


def curve_from_j(j):
    """An integral short model with j-invariant j.

    Generic case A = 3j(1728 - j), B = 2j(1728 - j)^2, then scaled by the
    smallest u with u^4 A and u^6 B integral.
    """
    j = Fraction(j)
    if j == 0:
        return ShortModel(0, 1)
    if j == 1728:
        return ShortModel(1, 0)
    k = 1728 - j
    A = 3 * j * k
    B = 2 * j * k * k
    dA, dB = A.denominator, B.denominator
    u = 1
    try:
        primes = arith.factorint(dA * dB)
    except FactorizationIncomplete:
        primes = None
    if primes is None:
        u = j.denominator
    else:
        for p in primes:
            vA, vB = arith.valuation(dA, p), arith.valuation(dB, p)
            u *= p ** max(-(-vA // 4), -(-vB // 6))
    A, B = A * u**4, B * u**6
    return ShortModel(int(A), int(B))


def reduce_twist(model):
    """Divide out d^2 from A and d^3 from B greedily (twist by 1/d ~ twist by d).

    Primes are taken from gcd(A, B) (or from the nonzero coefficient); an
    unfactorable cofactor is treated as a single prime.
    """
    A, B = model.A, model.B
    g = abs(gcd(A, B))
    if g <= 1:
        return model
    try:
        primes = list(arith.factorint(g))
    except FactorizationIncomplete as exc:
        primes = list(arith.factorint(exc.partial)) + [exc.cofactor]
    for p in primes:
        while A % (p * p) == 0 and B % (p**3) == 0:
            A //= p * p
            B //= p**3
    return ShortModel(A, B)


# -- group law ---------------------------------------------------------------


def on_curve(model, P):
    if P is None:
        return True
    a1, a2, a3, a4, a6 = as_weierstrass(model).ainvs
    x, y = P
    return y * y + a1 * x * y + a3 * y == x**3 + a2 * x * x + a4 * x + a6


def _check(model, P):
    if not on_curve(model, P):
        raise PointNotOnCurve(f"{P} is not on {as_weierstrass(model)}")


def make_point(x, y):
    return (Fraction(x), Fraction(y))


def negate(model, P):
    if P is None:
        return None
    a1, _, a3, _, _ = as_weierstrass(model).ainvs
    x, y = P
    return (x, -y - a1 * x - a3)


def _add(ainvs, P, Q):
    if P is None:
        return Q
    if Q is None:
        return P
    a1, a2, a3, a4, a6 = ainvs
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if y1 + y2 + a1 * x2 + a3 == 0:
            return None
        den = 2 * y1 + a1 * x1 + a3
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / den
        nu = (-(x1**3) + a4 * x1 + 2 * a6 - a3 * y1) / den
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = (y1 * x2 - y2 * x1) / (x2 - x1)
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return (x3, y3)


def add_points(model, P, Q):
    """P + Q under the chord-tangent law."""
    _check(model, P)
    _check(model, Q)
    return _add(as_weierstrass(model).ainvs, P, Q)


def sub_points(model, P, Q):
    return add_points(model, P, negate(model, Q))


def multiply(model, P, k):
    """k * P by double-and-add."""
    _check(model, P)
    ainvs = as_weierstrass(model).ainvs
    if k < 0:
        P, k = negate(model, P), -k
    R = None
    while k:
        if k & 1:
            R = _add(ainvs, R, P)
        P = _add(ainvs, P, P)
        k >>= 1
    return R


# -- minimal models -----------------------------------------------------------


def _kraus_at(c4, c6, p):
    if p == 3:
        return c6 % 27 not in (9, 18)
    if p == 2:
        if c6 % 2 == 1:
            return c6 % 4 == 3
        return c4 % 16 == 0 and c6 % 32 in (0, 8)
    return True


def _model_from_c(c4, c6):
    """Reduced integral model with given c4, c6 (which must satisfy Kraus's conditions)."""
    b2 = (-c6) % 12
    if b2 > 6:
        b2 -= 12
    b4, r4 = divmod(b2 * b2 - c4, 24)
    b6, r6 = divmod(-(b2**3) + 36 * b2 * b4 - c6, 216)
    if r4 or r6:
        raise ValueError(f"c4={c4}, c6={c6} fail Kraus's conditions")
    a1 = b2 % 2
    a3 = b6 % 2
    return WeierstrassModel(a1, (b2 - a1) // 4, a3, (b4 - a1 * a3) // 2, (b6 - a3) // 4)


def scale_model(model, u):
    """The integral model with invariants c4*u^4, c6*u^6 (coordinates scaled by u)."""
    a1, a2, a3, a4, a6 = as_weierstrass(model).ainvs
    return WeierstrassModel(a1 * u, a2 * u**2, a3 * u**3, a4 * u**4, a6 * u**6)


def minimality_defect(c4, c6, disc, p):
    """Largest d with c4/p^4d, c6/p^6d the invariants of an integral model."""
    big = 10**9
    v4 = arith.valuation(c4, p)
    v6 = arith.valuation(c6, p)
    vd = arith.valuation(disc, p)
    d = min(big if v4 is None else v4 // 4, big if v6 is None else v6 // 6, vd // 12)
    while d > 0 and not _kraus_at(c4 // p ** (4 * d), c6 // p ** (6 * d), p):
        d -= 1
    return d


def minimal_model(model):
    """Global minimal model in reduced form (a1, a3 in {0, 1}, a2 in {-1, 0, 1})."""
    inv = compute_invariants(model)
    c4, c6, disc = inv.c4, inv.c6, inv.disc
    g = abs(gcd(c4, c6))
    try:
        primes = list(arith.factorint(g)) if g > 1 else []
    except FactorizationIncomplete as exc:
        primes = list(arith.factorint(exc.partial)) + [exc.cofactor]
    u = 1
    for p in primes:
        d = minimality_defect(c4, c6, disc, p)
        u *= p**d
    return _model_from_c(c4 // u**4, c6 // u**6)
