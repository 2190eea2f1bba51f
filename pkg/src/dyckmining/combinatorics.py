"""Catalan numbers, the Catalan generating function and Dyck words.

Words are strings over ``{"S", "H"}``: ``S`` (an attacker block) plays the
role of an opening bracket and ``H`` (an honest block) of a closing one.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

from .errors import CapExceededError, DomainError

#: Largest semilength accepted by :func:`enumerate_dyck_words` (C_15 = 9,694,845).
ENUMERATION_CAP = 15

ALPHABET = ("S", "H")


def catalan_number(n: int) -> int:
    """Return the n-th Catalan number ``(2n)! / (n! (n+1)!)`` exactly."""
    if n < 0:
        raise DomainError(f"catalan_number needs n >= 0, got {n}")
    return math.comb(2 * n, n) // (n + 1)


def _exact_sqrt(x: Fraction) -> Fraction | None:
    num, den = x.numerator, x.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def exact_or_float_sqrt(x):
    """Square root that stays an exact Fraction when ``x`` is a rational square."""
    if isinstance(x, (int, Fraction)):
        root = _exact_sqrt(Fraction(x))
        if root is not None:
            return root
    return math.sqrt(float(x))


def catalan_gf(x):
    """Evaluate ``C(x) = sum_n C_n x^n = (1 - sqrt(1 - 4x)) / (2x)`` on [0, 1/4].

    The equivalent form ``2 / (1 + sqrt(1 - 4x))`` is used, which is free of
    the 0/0 at ``x = 0`` (where ``C(0) = 1``) and of cancellation near it.
    A :class:`~fractions.Fraction` argument whose discriminant is a rational
    square gives an exact Fraction result; anything else returns a float.
    """
    if x < 0 or x > Fraction(1, 4):
        raise DomainError(f"catalan_gf is defined on [0, 1/4], got {x}")
    disc = 1 - 4 * x
    if isinstance(x, (int, Fraction)):
        root = _exact_sqrt(Fraction(disc))
        if root is not None:
            return 2 / (1 + root)
    return 2.0 / (1.0 + math.sqrt(float(disc)))


def is_dyck_word(word: str) -> bool:
    """True when no prefix of ``word`` has more H than S and the counts balance.

    Letters other than S and H make the word invalid.
    """
    depth = 0
    for letter in word:
        if letter == "S":
            depth += 1
        elif letter == "H":
            depth -= 1
            if depth < 0:
                return False
        else:
            return False
    return depth == 0


def _dyck_words(n: int):
    # depth-first over (opened, closed) counts; yields in lexicographic order
    buf: list[str] = []

    def walk(opened: int, closed: int):
        if closed == n:
            yield "".join(buf)
            return
        if opened < n:
            buf.append("S")
            yield from walk(opened + 1, closed)
            buf.pop()
        if closed < opened:
            buf.append("H")
            yield from walk(opened, closed + 1)
            buf.pop()

    return walk(0, 0)


def enumerate_dyck_words(n: int) -> frozenset[str]:
    """All Dyck words of length ``2n`` (``n <= ENUMERATION_CAP``)."""
    if n < 0:
        raise DomainError(f"semilength must be >= 0, got {n}")
    if n > ENUMERATION_CAP:
        raise CapExceededError(
            f"enumeration capped at semilength {ENUMERATION_CAP}, got {n}"
        )
    return frozenset(_dyck_words(n))


def brute_force_dyck_words(n: int) -> set[str]:
    """Filter all ``4**n`` words of length 2n through :func:`is_dyck_word`.

    Exponential; only meant as an independent check of the enumerator.
    """
    return {
        "".join(letters)
        for letters in product(ALPHABET, repeat=2 * n)
        if is_dyck_word("".join(letters))
    }
