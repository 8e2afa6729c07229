"""Rank lower bounds: point search, torsion test, canonical heights, independence.

Canonical heights use the doubling limit

    h^(P) = lim 4^-n h_x(2^n P),   h_x(P) = log max(|X|, |Z|) for x(P) = X/Z,

with the explicit tail bound |h^(P) - 4^-n h_x(2^n P)| <= C(E) / (3 * 4^n).
The exact coordinates of 2^n P have about 4^n digits, so they are never formed:
their residues modulo a fixed power of an integer ``den`` (which every
gcd(Phi, Psi) divides) are tracked exactly, and their size is tracked in
floating point as a normalized pair plus a log scale.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import json
from math import factorial, gcd, isqrt, log

import mpmath
import numpy as np

from . import arith
from .ec import as_weierstrass, b_invariants, compute_invariants, multiply, negate, on_curve, _add, WeierstrassModel
from .errors import PointNotOnCurve, PrecisionUnreachable

DEFAULT_TOL = 1e-6
MAX_STEPS = 64
MODULUS_BITS = 1 << 22


# -- point search -------------------------------------------------------------


@dataclass(frozen=True)
class PointSearchConfig:
    """Search x = m/e^2 with 1 <= e <= den_bound and |m| <= num_bound * e^2."""

    num_bound: int
    den_bound: int
    sieve_primes: tuple = None  # None picks good odd primes below 60

    def __post_init__(self):
        if self.num_bound < 1 or self.den_bound < 1:
            raise ValueError("search bounds must be >= 1")


def _sieve_for(model, config):
    disc = compute_invariants(model).disc
    if config.sieve_primes is None:
        return [p for p in arith.primes_up_to(60) if p > 2 and disc % p]
    primes = list(config.sieve_primes)
    for p in primes:
        if not arith.is_prime(p) or p == 2 or disc % p == 0:
            raise ValueError(f"sieve prime {p} is not an odd prime of good reduction")
    return primes


def _square_table(p):
    t = np.zeros(p, dtype=bool)
    t[(np.arange(p) ** 2) % p] = True
    return t


def point_search(model, config, sieve=True):
    """Affine rational points with x in the configured box.

    Both y-values are returned for every x found. With ``sieve`` set, an x is
    skipped only when some sieve prime proves the discriminant of the
    y-equation is not a square, so the result equals the unsieved search.
    Output order: naive height of x, then x, then y.
    """
    model = as_weierstrass(model)
    a1, _, a3, _, _ = model.ainvs
    b2, b4, b6, _ = b_invariants(model)
    primes = _sieve_for(model, config) if sieve else []
    tables = [_square_table(p) for p in primes]
    found = []
    for e in range(1, config.den_bound + 1):
        lim = config.num_bound * e * e
        ms = np.arange(-lim, lim + 1, dtype=np.int64)
        keep = np.gcd(ms, e) == 1
        # (2y + a1 x + a3)^2 e^6 = 4m^3 + b2 m^2 e^2 + 2 b4 m e^4 + b6 e^6
        for p, sq in zip(primes, tables):
            r = ms % p
            e2 = e * e % p
            v = (4 * r + b2 * e2 % p) % p
            v = (v * r + 2 * b4 * e2 * e2 % p) % p
            v = (v * r + b6 * pow(e2, 3, p) % p) % p
            keep &= sq[v]
        e2, e4, e6 = e * e, e**4, e**6
        for m in ms[keep].tolist():
            v = 4 * m**3 + b2 * m * m * e2 + 2 * b4 * m * e4 + b6 * e6
            if v < 0:
                continue
            s = isqrt(v)
            if s * s != v:
                continue
            x = Fraction(m, e2)
            for t in {s, -s}:
                y = (Fraction(t, e**3) - a1 * x - a3) / 2
                found.append((x, y))
    for P in found:
        if not on_curve(model, P):
            raise AssertionError(f"point search produced {P} off the curve")
    found.sort(key=lambda P: (max(abs(P[0].numerator), P[0].denominator), P[0], P[1]))
    return found


# -- torsion ------------------------------------------------------------------


def is_torsion(model, P):
    """kP = O for some k <= 12; by Mazur's bound this decides torsion over Q."""
    if P is None:
        return True
    if not on_curve(model, P):
        raise PointNotOnCurve(f"{P} is not on {as_weierstrass(model)}")
    ainvs = as_weierstrass(model).ainvs
    Q = P
    for _ in range(12):
        if Q is None:
            return True
        Q = _add(ainvs, Q, P)
    return Q is None


# -- canonical height -----------------------------------------------------------


def _solve(rows, rhs):
    """Exact Gaussian elimination over Q."""
    n = len(rows)
    A = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(rows, rhs)]
    for c in range(n):
        piv = next(i for i in range(c, n) if A[i][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        for i in range(n):
            if i != c and A[i][c] != 0:
                f = A[i][c] / A[c][c]
                A[i] = [u - f * w for u, w in zip(A[i], A[c])]
    return [A[i][n] / A[i][i] for i in range(n)]


@dataclass(frozen=True)
class _Doubling:
    phi: tuple  # coefficients of X^4, X^3 Z, ..., Z^4
    psi: tuple
    den: int
    C: float  # |h_x(2Q) - 4 h_x(Q)| <= C


_DOUBLING_CACHE = {}


def _doubling_data(model):
    model = as_weierstrass(model)
    if model in _DOUBLING_CACHE:
        return _DOUBLING_CACHE[model]
    b2, b4, b6, b8 = b_invariants(model)
    phi = (1, 0, -b4, -2 * b6, -b8)
    psi = (0, 4, b2, 2 * b4, b6)
    # f*phi + g*psi as a form of degree 7, f and g cubic forms (coefficients from X^3 down)
    rows = []
    for k in range(8):  # coefficient of X^(7-k) Z^k
        row = [phi[k - i] if 0 <= k - i <= 4 else 0 for i in range(4)]
        row += [psi[k - i] if 0 <= k - i <= 4 else 0 for i in range(4)]
        rows.append(row)
    sol_z = _solve(rows, [0] * 7 + [1])
    sol_x = _solve(rows, [1] + [0] * 7)
    den = 1
    for q in sol_z + sol_x:
        den = den * q.denominator // gcd(den, q.denominator)
    K2 = max(sum(abs(q * den) for q in sol) for sol in (sol_z, sol_x))
    C1 = max(1 + abs(b4) + 2 * abs(b6) + abs(b8), 4 + abs(b2) + 2 * abs(b4) + abs(b6))
    data = _Doubling(phi, psi, den, max(log(C1), log(K2)))
    _DOUBLING_CACHE[model] = data
    return data


def _form(c, X, Z):
    return c[0] * X**4 + c[1] * X**3 * Z + c[2] * X**2 * Z**2 + c[3] * X * Z**3 + c[4] * Z**4


def naive_x_height(P):
    x = P[0]
    return log(max(abs(x.numerator), x.denominator))


def steps_for(model, eps):
    """Doubling steps n with C(E) / (3 * 4^n) <= eps."""
    C = _doubling_data(model).C
    n = 0
    while C / (3 * 4**n) > eps:
        n += 1
    return n


def canonical_height(model, P, eps=DEFAULT_TOL / 16, steps=None):
    """h^(P) within eps (0 for torsion points).

    ``steps`` overrides the number of doublings (it must still meet eps).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    model = as_weierstrass(model)
    if is_torsion(model, P):
        return 0.0
    data = _doubling_data(model)
    need = steps_for(model, eps)
    n = need if steps is None else max(steps, need)
    if n > MAX_STEPS:
        raise PrecisionUnreachable(f"{n} doublings needed for eps={eps}")
    den = data.den
    if (n + 1) * den.bit_length() > MODULUS_BITS:
        raise PrecisionUnreachable("modulus for exact gcd tracking exceeds the budget")
    x = P[0]
    X, Z = x.numerator, x.denominator
    if n == 0:
        return log(max(abs(X), Z))
    M = den ** (n + 1)
    Xm, Zm = X % M, Z % M
    dps = 30 + int(-mpmath.log10(eps)) + n
    with mpmath.workdps(dps):
        s = max(abs(X), Z)
        u, v = mpmath.mpf(X) / s, mpmath.mpf(Z) / s
        L = mpmath.log(s)
        for _ in range(n):
            Pm, Qm = _form(data.phi, Xm, Zm) % M, _form(data.psi, Xm, Zm) % M
            g = gcd(gcd(Pm % den, Qm % den), den)
            pu, qv = _form(data.phi, u, v), _form(data.psi, u, v)
            big = max(abs(pu), abs(qv))
            if big == 0:
                raise PrecisionUnreachable("lost all precision in the doubling orbit")
            L = 4 * L + mpmath.log(big) - mpmath.log(g)
            u, v = pu / big, qv / big
            M //= g
            Xm, Zm = (Pm // g) % M, (Qm // g) % M
        return float(L / mpmath.mpf(4) ** n)


def height_pairing(model, P, Q, eps=DEFAULT_TOL / 16):
    """<P, Q> = (h^(P+Q) - h^(P) - h^(Q)) / 2."""
    ainvs = as_weierstrass(model).ainvs
    S = _add(ainvs, P, Q)
    return (canonical_height(model, S, eps) - canonical_height(model, P, eps)
            - canonical_height(model, Q, eps)) / 2


# -- certificates ---------------------------------------------------------------


def _fmt(P):
    return f"({P[0]},{P[1]})"


@dataclass
class RankCertificate:
    model: WeierstrassModel
    points: list
    gram: list
    tolerance: float
    eps: float
    heights: list = field(default_factory=list)

    @property
    def lower_bound(self):
        return len(self.points)

    def minors(self):
        G = np.array(self.gram, dtype=float).reshape(len(self.points), len(self.points))
        return [float(np.linalg.det(G[:k, :k])) for k in range(1, len(self.points) + 1)]

    def as_dict(self):
        return {
            "model": str(self.model),
            "points": [_fmt(P) for P in self.points],
            "gram": self.gram,
            "tolerance": self.tolerance,
            "eps": self.eps,
            "lower_bound": self.lower_bound,
        }

    def dumps(self):
        return json.dumps(self.as_dict(), indent=2) + "\n"


def _gram(model, pts, eps):
    k = len(pts)
    h = [canonical_height(model, P, eps) for P in pts]
    G = [[0.0] * k for _ in range(k)]
    for i in range(k):
        G[i][i] = h[i]
        for j in range(i):
            G[i][j] = G[j][i] = height_pairing(model, pts[i], pts[j], eps)
    return G


def rank_lower_bound(model, points, tol=DEFAULT_TOL, eps=None):
    """Greedy independent subset of ``points`` with a positive-definite height Gram matrix.

    Points are tried in increasing canonical height; one is kept when the new
    leading principal minor exceeds ``tol``. Pairings are recomputed at an eps
    small enough that the minor is known to within tol/4.
    """
    model = as_weierstrass(model)
    eps = tol / 16 if eps is None else eps
    pts = []
    for P in points:
        if P is not None and not on_curve(model, P):
            raise PointNotOnCurve(f"{P} is not on {model}")
        if P is not None and P not in pts and not is_torsion(model, P):
            pts.append(P)
    hs = {P: canonical_height(model, P, eps) for P in pts}
    order = sorted(pts, key=lambda P: (hs[P], P[0], P[1]))
    chosen = []
    for P in order:
        if hs[P] <= tol:
            continue
        trial = chosen + [P]
        k = len(trial)
        B = 1 + max(hs[Q] for Q in trial)
        e = min(eps, tol / (6 * k * factorial(k) * B ** (k - 1)))
        G = np.array(_gram(model, trial, e))
        if np.linalg.det(G) > tol:
            chosen = trial
    k = len(chosen)
    e = eps
    if k:
        B = 1 + max(hs[Q] for Q in chosen)
        e = min(eps, tol / (6 * k * factorial(k) * B ** (k - 1)))
    G = _gram(model, chosen, e)
    return RankCertificate(model, chosen, G, tol, e, [G[i][i] for i in range(k)])


__all__ = [
    "PointSearchConfig", "point_search", "is_torsion", "canonical_height", "height_pairing",
    "steps_for", "RankCertificate", "rank_lower_bound", "naive_x_height", "multiply", "negate",
]
