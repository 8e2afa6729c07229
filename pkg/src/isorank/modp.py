"""Reduction modulo primes: point counts, reduction types, a_p tables, twist transfer."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from math import gcd, isqrt
import random

import numpy as np

from . import arith
from .arith import kronecker
from .ec import WeierstrassModel, as_weierstrass, compute_invariants, minimality_defect
from .errors import BadReduction, IsorankError, NonMinimalModel, ParseError, TransferNotApplicable

CROSSOVER = 2**14
BSGS_ATTEMPTS = 48

__all__ = [
    "ReductionType", "ApRecord", "ApTable", "count_points", "reduction_type", "ap",
    "ap_table", "twisted_ap", "twisted_ap_total", "kronecker", "smooth_point_count",
]


class ReductionType(Enum):
    GOOD = "g"
    SPLIT = "s"
    NONSPLIT = "n"
    ADDITIVE = "a"

    @property
    def code(self):
        return self.value


_BAD_AP = {ReductionType.SPLIT: 1, ReductionType.NONSPLIT: -1, ReductionType.ADDITIVE: 0}


@dataclass(frozen=True)
class ApRecord:
    p: int
    ap: int
    type: ReductionType


# -- point counting -----------------------------------------------------------


def _affine_count(ainvs, p):
    """Number of affine solutions of the Weierstrass equation over F_p (singular point included)."""
    a1, a2, a3, a4, a6 = ainvs
    if p == 2:
        return sum(
            1
            for x in range(2)
            for y in range(2)
            if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % 2 == 0
        )
    # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    b2 = (a1 * a1 + 4 * a2) % p
    b4 = (2 * a4 + a1 * a3) % p
    b6 = (a3 * a3 + 4 * a6) % p
    x = np.arange(p, dtype=np.int64)
    f = (4 * x + b2) % p
    f = (f * x + 2 * b4) % p
    f = (f * x + b6) % p
    squares = np.zeros(p, dtype=bool)
    squares[(x * x) % p] = True
    zeros = int(np.count_nonzero(f == 0))
    residues = int(np.count_nonzero(squares[f])) - zeros
    return zeros + 2 * residues


def _ec_add(P, Q, a, p):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def _ec_mul(P, k, a, p):
    R = None
    while k:
        if k & 1:
            R = _ec_add(R, P, a, p)
        P = _ec_add(P, P, a, p)
        k >>= 1
    return R


def _random_point(a, b, p, rng):
    while True:
        x = rng.randrange(p)
        rhs = (x * x * x + a * x + b) % p
        if rhs == 0:
            return (x, 0)
        if pow(rhs, (p - 1) // 2, p) == 1:
            return (x, arith.sqrt_mod(rhs, p))


def _small_factors(n):
    fac, q = [], 2
    while q * q <= n:
        if n % q == 0:
            fac.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        fac.append(n)
    return fac


def _point_order(P, a, p, lo, hi):
    """Order of P, given that some multiple of it lies in [lo, hi]."""
    width = hi - lo
    m = isqrt(width) + 1
    baby = {}
    Q = None
    for j in range(m):
        baby.setdefault(Q, j)
        Q = _ec_add(Q, P, a, p)
    giant = Q  # m * P
    neg_giant = None if giant is None else (giant[0], (-giant[1]) % p)
    R = _ec_mul(P, lo, a, p)
    S = None if R is None else (R[0], (-R[1]) % p)
    for i in range(m + 1):
        if S in baby:
            M = lo + i * m + baby[S]
            break
        S = _ec_add(S, neg_giant, a, p)
    else:
        raise ArithmeticError(f"no multiple of point order found in Hasse interval at p={p}")
    for q in _small_factors(M):
        while M % q == 0 and _ec_mul(P, M // q, a, p) is None:
            M //= q
    return M


def _count_bsgs(model, p, seed=0):
    inv = compute_invariants(model)
    a, b = (-27 * inv.c4) % p, (-54 * inv.c6) % p
    rng = random.Random(f"{as_weierstrass(model)}|{p}|{seed}")
    r = isqrt(4 * p)
    lo, hi = p + 1 - r, p + 1 + r
    g = 2
    while pow(g, (p - 1) // 2, p) != p - 1:
        g += 1
    ta, tb = a * g * g % p, b * g * g * g % p
    lcm_e = lcm_t = 1
    for attempt in range(BSGS_ATTEMPTS):
        if attempt % 2 == 0:
            P = _random_point(a, b, p, rng)
            o = _point_order(P, a, p, lo, hi)
            lcm_e = lcm_e * o // gcd(lcm_e, o)
        else:
            P = _random_point(ta, tb, p, rng)
            o = _point_order(P, ta, p, 2 * p + 2 - hi, 2 * p + 2 - lo)
            lcm_t = lcm_t * o // gcd(lcm_t, o)
        first = -(-lo // lcm_e) * lcm_e
        cands = [n for n in range(first, hi + 1, lcm_e) if (2 * p + 2 - n) % lcm_t == 0]
        if len(cands) == 1:
            return int(cands[0])
    # exponent too small to pin the order down (only happens for tiny p)
    return 1 + _affine_count(as_weierstrass(model).ainvs, p)


def count_points(model, p, method="naive", seed=0):
    """#E(F_p) including the point at infinity, for a prime of good reduction."""
    inv = compute_invariants(model)
    if inv.disc % p == 0:
        raise BadReduction(p)
    if method == "naive" or p < 5:
        return 1 + _affine_count(as_weierstrass(model).ainvs, p)
    if method == "bsgs":
        return _count_bsgs(model, p, seed)
    raise ValueError(f"unknown counting method {method!r}")


def smooth_point_count(model, p):
    """#E^ns(F_p) at a bad prime: affine points minus the singular one, plus infinity."""
    return _affine_count(as_weierstrass(model).ainvs, p)


# -- reduction types and a_p ---------------------------------------------------


def check_minimal_at(model, p, inv=None):
    inv = inv or compute_invariants(model)
    if minimality_defect(inv.c4, inv.c6, inv.disc, p) > 0:
        raise NonMinimalModel(p)


def reduction_type(model, p, inv=None):
    inv = inv or compute_invariants(model)
    if inv.disc % p:
        return ReductionType.GOOD
    check_minimal_at(model, p, inv)
    if p in (2, 3):
        n = smooth_point_count(model, p)
        return {p - 1: ReductionType.SPLIT, p + 1: ReductionType.NONSPLIT, p: ReductionType.ADDITIVE}[n]
    if inv.c4 % p == 0:
        return ReductionType.ADDITIVE
    if kronecker(-inv.c6, p) == 1:
        return ReductionType.SPLIT
    return ReductionType.NONSPLIT


def ap_record(model, p, method=None, seed=0, inv=None, crossover=CROSSOVER):
    inv = inv or compute_invariants(model)
    rt = reduction_type(model, p, inv)
    if rt is not ReductionType.GOOD:
        return ApRecord(p, _BAD_AP[rt], rt)
    if method is None:
        method = "naive" if p < crossover else "bsgs"
    n = count_points(model, p, method, seed)
    a = p + 1 - n
    if a * a > 4 * p:
        raise ArithmeticError(f"Hasse bound violated at p={p}: a_p={a}")
    return ApRecord(p, a, rt)


def ap(model, p, method=None, seed=0):
    return ap_record(model, p, method, seed).ap


# -- tables -------------------------------------------------------------------


@dataclass(frozen=True)
class ApTable:
    model: WeierstrassModel
    bound: int
    records: tuple

    def __post_init__(self):
        ps = [r.p for r in self.records]
        if ps != arith.primes_up_to(self.bound):
            raise ValueError("ApTable records must cover every prime <= bound, sorted")

    def upto(self, t):
        """Records with p <= t."""
        return [r for r in self.records if r.p <= t]

    def dumps(self):
        lines = [f"apcache 1 {self.model} {self.bound}"]
        lines += [f"{r.p} {r.ap} {r.type.code}" for r in self.records]
        return "\n".join(lines) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text):
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        head = lines[0].split(" ")
        if len(head) != 4 or head[0] != "apcache" or head[1] != "1":
            raise ParseError(f"bad apcache header: {lines[0]!r}")
        model = WeierstrassModel.parse(head[2])
        codes = {t.code: t for t in ReductionType}
        records = []
        for line in lines[1:]:
            p, a, c = line.split(" ")
            records.append(ApRecord(int(p), int(a), codes[c]))
        return cls(model, int(head[3]), tuple(records))

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def _records_for(args):
    model, primes, seed, crossover = args
    inv = compute_invariants(model)
    out = []
    for p in primes:
        try:
            out.append(ap_record(model, p, seed=seed, inv=inv, crossover=crossover))
        except IsorankError as exc:
            exc.p = p
            raise
    return out


def ap_table(model, bound, workers=1, seed=0, crossover=CROSSOVER):
    """a_p for every prime p <= bound. The result does not depend on ``workers``."""
    if bound < 2:
        raise ValueError("bound must be >= 2")
    model = as_weierstrass(model)
    primes = arith.primes_up_to(bound)
    if workers <= 1 or len(primes) < 64:
        records = _records_for((model, primes, seed, crossover))
    else:
        # interleave so expensive large primes spread evenly
        chunks = [primes[i::workers * 4] for i in range(workers * 4)]
        with ProcessPoolExecutor(workers) as pool:
            parts = pool.map(_records_for, [(model, c, seed, crossover) for c in chunks])
            records = sorted((r for part in parts for r in part), key=lambda r: r.p)
    return ApTable(model, bound, tuple(records))


# -- twists -------------------------------------------------------------------


def twisted_ap(base, D):
    """a_p of the twist by D from a good-reduction record of E, for p not dividing 2D."""
    p = base.p
    if base.type is not ReductionType.GOOD or p == 2 or D % p == 0:
        raise TransferNotApplicable(f"transfer undefined at p={p} for D={D}")
    return kronecker(D, p) * base.ap


def twisted_ap_total(base, D):
    """Total version of :func:`twisted_ap` used by twist scans.

    Returns ``(a_p, exact)``. Ramified primes of Q(sqrt D) make a good or
    multiplicative prime additive (a_p = 0); unramified ones multiply a_p by the
    Kronecker symbol. The only inexact case is an additive prime of E that is
    ramified in Q(sqrt D), where the twist may regain good reduction; 0 is
    returned there and ``exact`` is False.
    """
    p = base.p
    if p == 2:
        ramified = D % 4 != 1
    else:
        ramified = D % p == 0
    if not ramified:
        return kronecker(D, p) * base.ap, True
    return 0, base.type is not ReductionType.ADDITIVE
