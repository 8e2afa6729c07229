from math import gcd, isqrt
import random

from hypothesis import given, strategies as st
import numpy as np
import pytest

from isorank import arith
from isorank.errors import FactorizationIncomplete


def brute_primes(n):
    return [p for p in range(2, n + 1) if all(p % q for q in range(2, isqrt(p) + 1))]


def brute_sqf(n):
    sign = -1 if n < 0 else 1
    n = abs(n)
    out, p = 1, 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            out *= p
        p += 1
    return sign * out * n


def jacobi_by_euler(a, p):
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def test_primes_match_trial_division():
    assert arith.primes_up_to(2000) == brute_primes(2000)
    assert arith.primes_up_to(1) == []


@given(st.integers(min_value=-10**6, max_value=10**6), st.sampled_from(brute_primes(500)[1:]))
def test_kronecker_equals_euler_criterion(a, p):
    assert arith.kronecker(a, p) == jacobi_by_euler(a, p)


@given(st.integers(-500, 500), st.integers(1, 400).map(lambda k: 2 * k + 1), st.integers(1, 400).map(lambda k: 2 * k + 1))
def test_jacobi_multiplicative_in_modulus(a, m, n):
    assert arith.kronecker(a, m * n) == arith.kronecker(a, m) * arith.kronecker(a, n)


def test_kronecker_at_two():
    # (a|2) = 0 for even a, 1 for a = +-1 mod 8, -1 for a = +-3 mod 8
    for a in range(-40, 41):
        want = 0 if a % 2 == 0 else (1 if a % 8 in (1, 7) else -1)
        assert arith.kronecker(a, 2) == want


def test_legendre_many_matches_scalar():
    ps = np.array(brute_primes(3000)[1:])
    for a in (-7, -1, 2, 3, 12345, -999983, 10**9 + 7):
        got = arith.legendre_many(a, ps)
        assert got.tolist() == [arith.kronecker(a, int(p)) for p in ps]


@given(st.integers(-10**8, 10**8).filter(bool))
def test_squarefree_part_brute(n):
    s = arith.squarefree_part(n)
    assert s == brute_sqf(n)
    q = n // s
    assert q > 0 and isqrt(q) ** 2 == q


def test_squarefree_part_large_prime_square():
    p = 1000003
    q = 999999937
    assert arith.squarefree_part(7 * p * p * q) == 7 * q
    assert arith.squarefree_part(-(p**2) * q**2) == -1


def test_factorint_rho_path():
    n = 1000003 * 1000033 * 1000037
    assert arith.factorint(n) == {1000003: 1, 1000033: 1, 1000037: 1}


def test_factoring_budget_surfaces():
    p, q = 1000000000039, 1000000000061
    with pytest.raises(FactorizationIncomplete) as info:
        arith.squarefree_part(6 * p * q, rho_iterations=10)
    exc = info.value
    assert exc.value == 6 * p * q
    assert exc.partial * exc.cofactor == 6 * p * q


def test_squarefree_batch_agrees():
    rng = random.Random(5)
    vals = [rng.randrange(-10**12, 10**12) or 1 for _ in range(300)]
    assert [int(v) for v in arith.squarefree_parts(vals)] == [arith.squarefree_part(v) for v in vals]


def test_squarefree_range():
    assert arith.squarefree_range(1, 200) == [n for n in range(1, 201) if brute_sqf(n) == n]


@given(st.integers(2, 10**6))
def test_is_prime_agrees_with_sieve(n):
    assert arith.is_prime(n) == (n in set(arith.primes_up_to(10**6)))


def test_sqrt_mod():
    for p in brute_primes(300)[1:]:
        for a in range(p):
            if jacobi_by_euler(a, p) >= 0:
                r = arith.sqrt_mod(a, p)
                assert r * r % p == a


def test_valuation():
    assert arith.valuation(48, 2) == 4
    assert arith.valuation(0, 3) is None
    assert gcd(arith.icbrt(10**30 + 5), 1) == 1 and arith.icbrt(10**30 + 5) == 10**10
