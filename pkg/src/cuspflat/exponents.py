"""Extended-real exponents and the critical cusp power.

Finite exponents are held as ``fractions.Fraction`` so that the
critical case ``beta == beta_cr`` is decided exactly.  Floats are
converted through their exact binary value; ``math.inf`` stands for an
infinite exponent.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .exceptions import DomainError

INF = math.inf


def as_exponent(value):
    """Coerce ``value`` to an exact exponent (``Fraction`` or ``math.inf``).

    Strings may be ``"inf"``, a decimal such as ``"1.5"`` or a ratio
    such as ``"3/2"``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity", "∞"):
            return INF
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse exponent {value!r}") from exc
    if isinstance(value, bool):
        raise DomainError("booleans are not exponents")
    if isinstance(value, int):
        return Fraction(value)
    value = float(value)
    if math.isnan(value):
        raise DomainError("exponent is NaN")
    if math.isinf(value):
        if value < 0:
            raise DomainError("exponent must be positive")
        return INF
    return Fraction(value)


def is_inf(x):
    return isinstance(x, float) and math.isinf(x)


def format_exponent(x):
    if is_inf(x):
        return "inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ExponentPair:
    """Integrability exponents: ``q`` on the cusp domain, ``p`` on its complement."""

    q: object
    p: object

    def __post_init__(self):
        q, p = as_exponent(self.q), as_exponent(self.p)
        if q < 1:
            raise DomainError(f"q must be >= 1, got {format_exponent(q)}")
        if p <= 1:
            raise DomainError(f"p must satisfy p > 1, got {format_exponent(p)}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    def swapped(self):
        return ExponentPair(q=self.p, p=self.q)


def critical_branch(p, q):
    """Which case of the critical-power formula applies."""
    p, q = as_exponent(p), as_exponent(q)
    if is_inf(p) and is_inf(q):
        return "limit"
    if is_inf(p):
        return "2/q+1"
    if is_inf(q):
        return "(p+1)/(p-1)"
    return "(pq+2p+q)/(pq-q)"


def beta_critical(p, q):
    """Critical power of inward cusps for the exponent pair ``(q, p)``.

    Returns a ``Fraction``.  With both exponents infinite the common
    limit of the two one-sided branches, 1, is returned: no cusp with
    ``beta > 1`` can then be flattened.
    """
    pair = ExponentPair(q=q, p=p)
    p, q = pair.p, pair.q
    branch = critical_branch(p, q)
    if branch == "limit":
        return Fraction(1)
    if branch == "2/q+1":
        return 2 / q + 1
    if branch == "(p+1)/(p-1)":
        return (p + 1) / (p - 1)
    return (p * q + 2 * p + q) / (p * q - q)


def max_p_for_beta(beta):
    """Largest admissible common exponent ``p = q`` for a cusp of power ``beta``."""
    beta = as_exponent(beta)
    if is_inf(beta) or beta <= 1:
        raise DomainError(f"need beta > 1, got {beta}")
    return (beta + 3) / (beta - 1)
