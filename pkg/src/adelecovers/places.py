"""Places of Q: primes as ints, the archimedean place as the string ``"inf"``."""

from __future__ import annotations

from typing import Iterable, Union

from .arith import is_prime

INF = "inf"

Place = Union[int, str]


def parse_place(text: str | int) -> Place:
    if isinstance(text, int):
        p = text
    else:
        text = text.strip().lower()
        if text in ("inf", "infinity", "oo", "∞"):
            return INF
        p = int(text)
    if not is_prime(p):
        raise ValueError(f"{p} is not a prime")
    return p


def place_key(v: Place) -> tuple[int, int]:
    """Sort key putting finite primes in order and the archimedean place last."""
    return (1, 0) if v == INF else (0, int(v))


def sorted_places(places: Iterable[Place]) -> list[Place]:
    return sorted(set(places), key=place_key)


def format_place(v: Place) -> str:
    return INF if v == INF else str(v)
