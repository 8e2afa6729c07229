"""Elementary number theory: primes, Kronecker symbols, factoring, squarefree parts."""

from functools import lru_cache
from math import gcd, isqrt
import random

import numpy as np

from .errors import FactorizationIncomplete, ZeroInput

TRIAL_LIMIT = 10**6
RHO_ITERATIONS = 200_000

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def primes_up_to(n):
    """Sorted list of primes <= n (sieve of Eratosthenes)."""
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].tolist()


@lru_cache(maxsize=8)
def _prime_tuple(n):
    return tuple(primes_up_to(n))


def small_primes(n=TRIAL_LIMIT):
    return _prime_tuple(n)


def is_prime(n):
    """Miller-Rabin with the first 13 prime bases.

    Deterministic below 3.3e24; a strong probable-prime test above that.
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def valuation(n, p):
    """p-adic valuation of a nonzero integer; None stands for +infinity (n == 0)."""
    if n == 0:
        return None
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def icbrt(n):
    """Floor of the real cube root of n >= 0."""
    if n < 0:
        raise ValueError("icbrt of negative number")
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + 2) // 3)
    while True:
        y = (2 * x + n // (x * x)) // 3
        if y >= x:
            break
        x = y
    while x * x * x > n:
        x -= 1
    while (x + 1) ** 3 <= n:
        x += 1
    return x


def is_square(n):
    return n >= 0 and isqrt(n) ** 2 == n


def kronecker(a, n):
    """Kronecker symbol (a|n) for arbitrary integers a, n."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    k = 1
    if v % 2 == 1 and (a & 7) in (3, 5):
        k = -k
    if n < 0:
        n = -n
        if a < 0:
            k = -k
    # n is now odd and positive: Jacobi symbol
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if (n & 7) in (3, 5):
                k = -k
        a, n = n, a
        if a & n & 2:
            k = -k
        a %= n
    return k if n == 1 else 0


def legendre_many(a, primes):
    """Legendre symbols (a|p) for an array of odd primes p < 3e9, by Euler's criterion."""
    p = np.asarray(primes, dtype=np.int64)
    if -(1 << 62) < a < (1 << 62):
        base = np.mod(np.int64(a), p)
    else:
        base = np.array([a % int(q) for q in p], dtype=np.int64)
    e = (p - 1) // 2
    res = np.ones_like(p)
    while np.any(e):
        odd = (e & 1).astype(bool)
        res = np.where(odd, res * base % p, res)
        base = base * base % p
        e >>= 1
    return np.where(res == p - 1, -1, res)


def sqrt_mod(a, p):
    """A square root of a modulo the odd prime p (Tonelli-Shanks); a must be a residue."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def pollard_rho(n, max_iter=RHO_ITERATIONS, seed=1):
    """Brent's variant of Pollard rho. Returns a nontrivial factor or None."""
    if n % 2 == 0:
        return 2
    rng = random.Random(seed)
    used = 0
    while used < max_iter:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1 and used < max_iter:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            used += r
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def factorint(n, trial_limit=TRIAL_LIMIT, rho_iterations=RHO_ITERATIONS):
    """Prime factorization of |n| as a dict.

    Trial division up to ``trial_limit``, then Pollard rho on what remains.
    Raises FactorizationIncomplete if a composite cofactor survives the rho
    budget; ``partial`` is then the factored portion and ``cofactor`` the rest.
    """
    original = n = abs(n)
    if n == 0:
        raise ZeroInput("factorint(0)")
    fac = {}
    for p in small_primes(trial_limit):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            fac[p] = e
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if m <= trial_limit**2 or is_prime(m):
            fac[m] = fac.get(m, 0) + 1
            continue
        r = isqrt(m)
        if r * r == m:
            stack.extend((r, r))
            continue
        d = pollard_rho(m, rho_iterations)
        if d is None:
            partial = 1
            for p, e in fac.items():
                partial *= p**e
            raise FactorizationIncomplete(original, partial, original // partial)
        stack.extend((d, m // d))
    return dict(sorted(fac.items()))


def squarefree_part(n, trial_limit=TRIAL_LIMIT, rho_iterations=RHO_ITERATIONS):
    """The squarefree integer s with n/s a perfect square; the sign of n is kept.

    Trial division stops as soon as p**3 exceeds the cofactor: from then on the
    cofactor is 1, a prime, a product of two distinct primes, or a prime squared.
    Raises FactorizationIncomplete (partial = squarefree part found so far,
    signed) when the cofactor is still too large after the rho budget.
    """
    if n == 0:
        raise ZeroInput("squarefree part of 0")
    sign = -1 if n < 0 else 1
    m = abs(n)
    core = 1
    for p in small_primes(trial_limit):
        if p * p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if e & 1:
                core *= p
    else:
        # trial limit exhausted and the cofactor is still >= TRIAL_LIMIT**3
        if m > 1 and not is_prime(m):
            try:
                fac = factorint(m, trial_limit=2, rho_iterations=rho_iterations)
            except FactorizationIncomplete as exc:
                for p, e in factorint(exc.partial, trial_limit=2).items():
                    if e & 1:
                        core *= p
                raise FactorizationIncomplete(n, sign * core, exc.cofactor) from None
            for p, e in fac.items():
                if e & 1:
                    core *= p
            return sign * core
    r = isqrt(m)
    if r * r != m:
        core *= m
    return sign * core


def squarefree_parts(values):
    """Vectorized squarefree parts of an int64 array of nonzero integers (|v| < 2**62)."""
    v = np.asarray(values, dtype=np.int64)
    sign = np.where(v < 0, -1, 1).astype(np.int64)
    rem = np.abs(v)
    core = np.ones_like(rem)
    if rem.size == 0:
        return core
    limit = icbrt(int(rem.max())) + 1
    active = np.arange(rem.size)
    for i, p in enumerate(small_primes(max(limit, 2))):
        if p > limit:
            break
        sub = rem[active]
        hit = sub % p == 0
        if hit.any():
            idx = active[hit]
            vals = rem[idx]
            parity = np.zeros(idx.size, dtype=bool)
            div = np.ones(idx.size, dtype=bool)
            while div.any():
                vals = np.where(div, vals // p, vals)
                parity ^= div
                div = vals % p == 0
            rem[idx] = vals
            core[idx[parity]] *= p
        # rows whose cofactor has no prime factor <= cbrt are finished
        if i % 16 == 15:
            cube = np.int64(p) ** 3
            active = active[rem[active] >= cube]
            if active.size == 0:
                break
    root = np.sqrt(rem.astype(np.float64)).astype(np.int64)
    for _ in range(2):
        root = np.where(root * root > rem, root - 1, root)
        root = np.where((root + 1) * (root + 1) <= rem, root + 1, root)
    nonsq = root * root != rem
    core = np.where(nonsq, core * rem, core)
    return sign * core


def squarefree_range(lo, hi):
    """Squarefree integers in [lo, hi] with lo >= 1, as a sorted list."""
    if hi < lo:
        return []
    ok = np.ones(hi - lo + 1, dtype=bool)
    for p in primes_up_to(isqrt(hi)):
        q = p * p
        start = (-lo) % q
        ok[start::q] = False
    return (np.nonzero(ok)[0] + lo).tolist()


def is_squarefree(n):
    if n == 0:
        return False
    return abs(squarefree_part(n)) == abs(n)
