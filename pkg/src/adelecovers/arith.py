"""Small integer helpers shared by the other modules (desk-scale inputs only)."""

from __future__ import annotations

from functools import lru_cache
from math import gcd, lcm

__all__ = [
    "factorize",
    "prime_divisors",
    "divisors",
    "euler_phi",
    "is_prime",
    "primes_up_to",
    "multiplicative_order",
    "p_adic_split",
    "squarefree_part",
    "gcd",
    "lcm",
]


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation of ``|n|`` as sorted ``((p, e), ...)`` by trial division."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n):
        ds = [d * p**i for d in ds for i in range(e + 1)]
    return sorted(ds)


def euler_phi(n: int) -> int:
    result = n
    for p, _ in factorize(n):
        result = result // p * (p - 1)
    return result


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return factorize(n) == ((n, 1),)


def primes_up_to(n: int) -> list[int]:
    """Sieve of Eratosthenes."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def multiplicative_order(a: int, m: int) -> int:
    """Order of ``a`` in ``(Z/mZ)*``, reducing ``phi(m)`` prime by prime."""
    if m == 1:
        return 1
    a %= m
    if gcd(a, m) != 1:
        raise ValueError(f"{a} is not a unit mod {m}")
    order = euler_phi(m)
    for p, _ in factorize(order):
        while order % p == 0 and pow(a, order // p, m) == 1:
            order //= p
    return order


def p_adic_split(n: int, p: int) -> tuple[int, int]:
    """Return ``(v, u)`` with ``n = p**v * u`` and ``p`` not dividing ``u``."""
    if n == 0:
        raise ValueError("0 has infinite valuation")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def squarefree_part(d: int) -> int:
    """Signed squarefree kernel: ``d = squarefree_part(d) * s**2``."""
    if d == 0:
        raise ValueError("0 has no squarefree part")
    out = -1 if d < 0 else 1
    for p, e in factorize(d):
        if e % 2:
            out *= p
    return out
