"""Candidate-ranking heuristics for high-rank twists.

* Rogers frequency scan: which squarefree D occur most often as the class of
  f(r) for rationals r of small height.
* Mazur sign bias: running sum of sgn(a_p), scanned over a family of twists.
* Nagao score: sum over p <= N of (2 - a_p)/(p + 1 - a_p) * log p.
"""

from dataclasses import dataclass
import hashlib
from fractions import Fraction
from math import fsum, gcd, log

import numpy as np

from . import arith
from .checkpoint import run_chunks, split
from .ec import ShortModel, WeierstrassModel, b_invariants, compute_invariants
from .errors import FactorizationIncomplete, InsufficientTable, ZeroInput
from .modp import ReductionType, twisted_ap_total

# largest |F(a, b)| handled by the int64 batch path
_INT64_SAFE = 1 << 62


def squarefree_class(q):
    """The squarefree integer D with q/D a rational square (sign kept)."""
    q = Fraction(q)
    if q == 0:
        raise ZeroInput("squarefree class of 0")
    return arith.squarefree_part(q.numerator * q.denominator)


def _key_order(k):
    return (abs(k), k)


# -- Rogers -------------------------------------------------------------------


def cubic_coefficients(model):
    """Coefficients (c3, c2, c1, c0) of f with E^(D): D y^2 = f(x).

    Short models use f = x^3 + A x + B; long models use
    f = 4x^3 + b2 x^2 + 2 b4 x + b6, the completed-square form of the same curve.
    """
    if isinstance(model, ShortModel):
        return (1, 0, model.A, model.B)
    b2, b4, b6, _ = b_invariants(model)
    return (4, b2, 2 * b4, b6)


def eval_cubic(coeffs, x):
    c3, c2, c1, c0 = coeffs
    return ((c3 * x + c2) * x + c1) * x + c0


class FrequencyTable:
    """Squarefree class -> (count, witnesses), stored columnwise.

    ``D`` holds the distinct classes in ascending order, ``counts`` their
    multiplicities, and witness r-values for ``D[i]`` are
    ``num[offsets[i]:offsets[i+1]] / den[...]``, in scan order.
    ``unresolved`` lists (r, partial class, unfactored cofactor) for values the
    factoring budget could not settle.
    """

    def __init__(self, model, H, D, num, den, unresolved=()):
        self.model = model
        self.H = H
        try:
            D = np.asarray(D, dtype=np.int64)
        except OverflowError:
            D = np.asarray(D, dtype=object)
        order = np.argsort(D, kind="stable")
        self._wd = D[order]
        self.num = np.asarray(num, dtype=np.int64)[order]
        self.den = np.asarray(den, dtype=np.int64)[order]
        self.D, start, self.counts = np.unique(self._wd, return_index=True, return_counts=True)
        self.offsets = np.append(start, self._wd.size)
        self.unresolved = list(unresolved)

    def __len__(self):
        return int(self.D.size)

    def _index(self, D):
        i = int(np.searchsorted(self.D, D))
        if i < self.D.size and self.D[i] == D:
            return i
        return None

    def count(self, D):
        i = self._index(D)
        return 0 if i is None else int(self.counts[i])

    def witnesses(self, D, limit=None):
        i = self._index(D)
        if i is None:
            return []
        lo, hi = int(self.offsets[i]), int(self.offsets[i + 1])
        if limit is not None:
            hi = min(hi, lo + limit)
        return [Fraction(int(a), int(b)) for a, b in zip(self.num[lo:hi], self.den[lo:hi])]

    def as_dict(self):
        return {int(D): (int(c), self.witnesses(int(D))) for D, c in zip(self.D, self.counts)}

    def pairs(self):
        """Every recorded (D, r)."""
        for a, b, D in zip(self.num.tolist(), self.den.tolist(), self._wd.tolist()):
            D = int(D)
            yield D, Fraction(a, b)

    def ranked(self, k=None, witness_limit=None):
        """(D, count, witnesses) by descending count, then |D|, then sign."""
        if self.D.dtype == object:
            order = sorted(range(len(self)), key=lambda i: (-self.counts[i], abs(self.D[i]), self.D[i]))
        else:
            order = np.lexsort((self.D, np.abs(self.D), -self.counts))
        if k is not None:
            order = order[:k]
        return [(int(self.D[i]), int(self.counts[i]), self.witnesses(int(self.D[i]), witness_limit))
                for i in order]


def _rogers_chunk(args):
    coeffs, H, b_lo, b_hi = args
    c3, c2, c1, c0 = coeffs
    bound = (abs(c3) + abs(c2) + abs(c1) + abs(c0)) * H**3
    if bound < _INT64_SAFE:
        a = np.tile(np.arange(-H, H + 1, dtype=np.int64), b_hi - b_lo + 1)
        b = np.repeat(np.arange(b_lo, b_hi + 1, dtype=np.int64), 2 * H + 1)
        keep = np.gcd(a, b) == 1
        a, b = a[keep], b[keep]
        F = ((c3 * a + c2 * b) * a + c1 * b * b) * a + c0 * b * b * b
        nz = F != 0
        a, b, F = a[nz], b[nz], F[nz]
        core_f = arith.squarefree_parts(F)
        core_b = arith.squarefree_parts(b)
        g = np.gcd(core_f, core_b)
        D = (core_f // g) * (core_b // g)
        return {"D": D.tolist(), "a": a.tolist(), "b": b.tolist(), "unresolved": []}
    Ds, As, Bs, unresolved = [], [], [], []
    for b in range(b_lo, b_hi + 1):
        for a in range(-H, H + 1):
            if gcd(a, b) != 1:
                continue
            F = ((c3 * a + c2 * b) * a + c1 * b * b) * a + c0 * b**3
            if F == 0:
                continue
            try:
                Ds.append(arith.squarefree_part(F * b))
            except FactorizationIncomplete as exc:
                unresolved.append([a, b, exc.partial, exc.cofactor])
                continue
            As.append(a)
            Bs.append(b)
    return {"D": Ds, "a": As, "b": Bs, "unresolved": unresolved}


def rogers_scan(model, H, *, workers=1, snapshot=None, stop_after=None, chunk_size=25):
    """Frequency of squarefree classes D_r of f(r) over all r with height <= H.

    Roots of f are skipped. Values whose squarefree part cannot be determined
    within the factoring budget land in ``unresolved`` instead of the counts.
    """
    if H < 1:
        raise ValueError("H must be >= 1")
    compute_invariants(model)  # rejects singular models
    coeffs = cubic_coefficients(model)
    bs = list(range(1, H + 1))
    chunks = [(coeffs, H, c[0], c[-1]) for c in split(bs, chunk_size)]
    config = {"scan": "rogers", "coeffs": [str(c) for c in coeffs], "H": H,
              "chunk_size": chunk_size}
    payloads = run_chunks(_rogers_chunk, chunks, kind="rogers", config=config,
                          snapshot_path=snapshot, workers=workers, stop_after=stop_after)
    D = [d for pl in payloads for d in pl["D"]]
    a = [x for pl in payloads for x in pl["a"]]
    b = [x for pl in payloads for x in pl["b"]]
    unresolved = [(Fraction(x, y), part, cof) for pl in payloads for x, y, part, cof in pl["unresolved"]]
    return FrequencyTable(model, H, D, a, b, unresolved)


def witness_holds(model, D, r):
    """True iff D * y^2 = f(r) has a rational solution y."""
    v = eval_cubic(cubic_coefficients(model), Fraction(r)) / D
    return v >= 0 and arith.is_square(v.numerator) and arith.is_square(v.denominator)


# -- Mazur bias ---------------------------------------------------------------


@dataclass(frozen=True)
class BiasRecord:
    D: int
    min_bias: int
    final_bias: int
    t_max: int
    exact: bool = True


def _sgn(a):
    return (a > 0) - (a < 0)


def mazur_bias(table, t_max):
    """Running sums D(t) of sgn(a_p) over primes p <= t_max.

    Returns (trace, min_bias, final_bias); trace[i] is the sum through the
    i-th prime. The empty sum (t < 2) counts toward the minimum, so
    min_bias <= 0.
    """
    if table.bound < t_max:
        raise InsufficientTable(f"table bound {table.bound} < t_max {t_max}")
    trace, s = [], 0
    for r in table.records:
        if r.p > t_max:
            break
        s += _sgn(r.ap)
        trace.append(s)
    return trace, min([0] + trace), s


def _twist_bias_chunk(args):
    ps, aps, additive, t_max, Ds = args
    ps = np.asarray(ps, dtype=np.int64)
    aps = np.asarray(aps, dtype=np.int64)
    additive = np.asarray(additive, dtype=bool)
    two = ps[0] == 2 if ps.size else False
    base2 = (int(aps[0]), bool(additive[0])) if two else None
    odd_p = ps[1:] if two else ps
    odd_a = aps[1:] if two else aps
    odd_add = additive[1:] if two else additive
    out = []
    for D in Ds:
        # a_p(E^D) = (D|p) a_p(E) at odd p; (D|p) = 0 exactly when p ramifies
        twisted = arith.legendre_many(D, odd_p) * odd_a
        exact = not bool(np.any(odd_add & (D % odd_p == 0)))
        signs = np.sign(twisted)
        if two:
            a2 = arith.kronecker(D, 2) * base2[0] if D % 4 == 1 else 0
            exact = exact and not (D % 4 != 1 and base2[1])
            signs = np.concatenate(([_sgn(a2)], signs))
        partial = np.cumsum(signs)
        lo = min(0, int(partial.min())) if partial.size else 0
        fin = int(partial[-1]) if partial.size else 0
        out.append([D, lo, fin, exact])
    return out


def twist_values(lo, hi, signs=(1, -1)):
    """Squarefree D with lo <= |D| <= hi, ordered by |D| then sign."""
    mags = arith.squarefree_range(max(lo, 1), hi)
    return [s * m for m in mags for s in sorted(signs)]


def mazur_twist_scan(base, D_values, t_max, *, workers=1, snapshot=None,
                     stop_after=None, chunk_size=200):
    """Mazur bias of E^(D) for each squarefree D, transferred from E's table.

    ``base`` must be the a_p table of a minimal model. Non-squarefree D are
    skipped. The result is sorted by (min_bias, |D|, D). Records whose
    transfer could not be made exact at some prime carry ``exact=False``.
    """
    if base.bound < t_max:
        raise InsufficientTable(f"table bound {base.bound} < t_max {t_max}")
    Ds = [D for D in D_values if D != 0 and arith.is_squarefree(D)]
    recs = base.upto(t_max)
    ps = [r.p for r in recs]
    aps = [r.ap for r in recs]
    additive = [r.type is ReductionType.ADDITIVE for r in recs]
    chunks = [(ps, aps, additive, t_max, c) for c in split(Ds, chunk_size)]
    config = {"scan": "mazur", "model": str(base.model), "t_max": t_max,
              "D": [Ds[0], Ds[-1], len(Ds)] if Ds else [], "chunk_size": chunk_size,
              "D_hash": hash_ints(Ds)}
    payloads = run_chunks(_twist_bias_chunk, chunks, kind="mazur", config=config,
                          snapshot_path=snapshot, workers=workers, stop_after=stop_after)
    out = [BiasRecord(D, lo, fin, t_max, bool(ex)) for pl in payloads for D, lo, fin, ex in pl]
    out.sort(key=lambda r: (r.min_bias, abs(r.D), r.D))
    return out


def hash_ints(values):
    return hashlib.sha256(",".join(map(str, values)).encode()).hexdigest()


def twist_ap_pairs(base, D, t_max):
    """Per-prime (p, a_p(E^D), exact) from the transfer, scalar reference path."""
    out = []
    for r in base.upto(t_max):
        a, ex = twisted_ap_total(r, D)
        out.append((r.p, a, ex))
    return out


# -- Nagao --------------------------------------------------------------------


@dataclass(frozen=True)
class NagaoScore:
    value: float
    N: int
    model: WeierstrassModel


def nagao_score(table, N):
    """S(E, N) = sum_{p <= N} (2 - a_p)/(p + 1 - a_p) * log p.

    p + 1 - a_p is used as the denominator at every prime, good or bad.
    """
    if table.bound < N:
        raise InsufficientTable(f"table bound {table.bound} < N {N}")
    terms = [(2 - r.ap) / (r.p + 1 - r.ap) * log(r.p) for r in table.records if r.p <= N]
    return NagaoScore(fsum(terms), N, table.model)


def rank_candidates(scored, k, direction="max"):
    """Top-k keys by score; ties go to smaller |key|, then negative before positive."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if direction not in ("max", "min"):
        raise ValueError(f"direction must be 'max' or 'min', not {direction!r}")
    flip = -1 if direction == "max" else 1
    rows = sorted(scored, key=lambda ks: (flip * ks[1],) + _key_order(ks[0]))
    return [key for key, _ in rows[:k]]
