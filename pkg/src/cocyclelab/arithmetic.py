"""Continued fractions, best denominators, and Diophantine exponent estimates.

Quotients are certified by exact interval arithmetic on ``fractions.Fraction``
endpoints: a quotient is accepted only while the whole input interval maps to
the same integer part under the Gauss map, so the reported expansion is exact
for every real in the interval.  Input precision (not arithmetic) is the only
truncation source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InsufficientDepth, PrecisionExhausted, RationalInput

__all__ = [
    "Frequency",
    "cf_expand",
    "beta_estimate",
    "circle_dist",
    "golden_mean",
    "sqrt2_minus_1",
]


@dataclass
class Frequency:
    """An irrational in (0,1) with its continued-fraction data.

    ``value`` is a high-precision rational midpoint of the certification
    interval; ``convergents[k] == (p_k, q_k)`` for k = 0..M-1 with the usual
    seeds p0=0, p1=1, q0=1, q1=a1 (M = number of partial quotients).
    """

    value: Fraction
    partial_quotients: list[int]
    convergents: list[tuple[int, int]]
    beta_hat: float | None = None
    truncated: bool = False

    def __post_init__(self):
        self._validate()

    # -- convenience views -------------------------------------------------

    @property
    def alpha(self) -> float:
        return float(self.value)

    @property
    def denominators(self) -> list[int]:
        return [q for _, q in self.convergents]

    def __float__(self) -> float:
        return float(self.value)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_quotients(cls, quotients, beta_window=None) -> "Frequency":
        """Synthetic frequency with the given partial quotients.

        The value is the midpoint of the cylinder of reals whose expansion
        starts with ``quotients``; useful for Liouville-like test sequences.
        """
        a = [int(x) for x in quotients]
        if len(a) < 1 or any(x < 1 for x in a):
            raise ValueError("partial quotients must be positive integers")
        full = _convergents_full(a)
        p_m, q_m = full[-1]
        p_prev, q_prev = full[-2]
        mid = (Fraction(p_m, q_m) + Fraction(p_m + p_prev, q_m + q_prev)) / 2
        freq = cls(
            value=mid, partial_quotients=a, convergents=full[: len(a)], truncated=False
        )
        if len(freq.convergents) >= 4:
            freq.beta_hat = beta_estimate(freq, window=beta_window)
        return freq

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "alpha_decimal": _decimal_str(self.value, 40),
            "a": list(self.partial_quotients),
            "pq": [[p, q] for p, q in self.convergents],
            "beta_hat": float(self.beta_hat) if self.beta_hat is not None else None,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Frequency":
        a = [int(x) for x in obj["a"]]
        pq = [(int(p), int(q)) for p, q in obj["pq"]]
        freq = cls(
            value=Fraction(obj["alpha_decimal"]),
            partial_quotients=a,
            convergents=pq,
            beta_hat=obj.get("beta_hat"),
            truncated=bool(obj.get("truncated", False)),
        )
        return freq

    # -- invariants ----------------------------------------------------------

    def _validate(self):
        a, pq = self.partial_quotients, self.convergents
        assert len(a) == len(pq) >= 1
        assert pq == _convergents_full(a)[: len(a)], "convergent recurrence violated"
        qs = self.denominators
        assert all(qs[i] < qs[i + 1] for i in range(2, len(qs) - 1))
        # best-approximation bounds 1/(2 q_{n+1}) <= |q_n a - p_n| <= 1/q_{n+1},
        # exact rational arithmetic on the stored midpoint
        for n in range(len(pq) - 1):
            p_n, q_n = pq[n]
            q_next = pq[n + 1][1]
            dist = abs(q_n * self.value - p_n)
            assert Fraction(1, 2 * q_next) <= dist <= Fraction(1, q_next), (
                "best-approximation bound violated at index %d" % n
            )


def _convergents_full(a):
    """(p_k, q_k) for k = 0..M given quotients a_1..a_M."""
    pq = [(0, 1), (1, a[0])]
    for k in range(2, len(a) + 1):
        p_k = a[k - 1] * pq[k - 1][0] + pq[k - 2][0]
        q_k = a[k - 1] * pq[k - 1][1] + pq[k - 2][1]
        pq.append((p_k, q_k))
    return pq


def _decimal_str(x: Fraction, digits: int) -> str:
    sign = "-" if x < 0 else ""
    x = abs(x)
    whole, rem = divmod(x.numerator, x.denominator)
    out = []
    for _ in range(digits):
        rem *= 10
        d, rem = divmod(rem, x.denominator)
        out.append(str(d))
    return "%s%d.%s" % (sign, whole, "".join(out))


def _input_interval(alpha):
    """Certification interval for the supplied value; exact rationals refused."""
    if isinstance(alpha, Fraction) or isinstance(alpha, int):
        raise RationalInput("exact rational supplied: %r" % (alpha,))
    if isinstance(alpha, str):
        s = alpha.strip()
        val = Fraction(s)
        if "." in s:
            frac_digits = len(s.split(".")[1])
        elif "/" in s:
            raise RationalInput("exact rational supplied: %r" % (alpha,))
        else:
            frac_digits = 0
        half_ulp = Fraction(1, 2 * 10**frac_digits)
        return val - half_ulp, val + half_ulp
    if isinstance(alpha, float):
        val = Fraction(alpha)
        half_ulp = Fraction(math.ulp(alpha)) / 2
        return val - half_ulp, val + half_ulp
    raise TypeError("alpha must be float, decimal string, or Fraction")


def cf_expand(alpha, depth: int) -> Frequency:
    """Continued-fraction expansion with certified quotients.

    Parameters
    ----------
    alpha : float or str
        Value in (0,1).  A decimal string carries an implied half-last-digit
        uncertainty; a float carries half an ulp.  Exact rationals
        (``Fraction`` or int) raise ``RationalInput``.
    depth : int
        Number of quotients requested.  The expansion truncates earlier
        (with ``truncated=True``) if the interval stops certifying.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    lo, hi = _input_interval(alpha)
    if not (Fraction(0) < lo and hi < Fraction(1)):
        raise ValueError("alpha must lie strictly in (0,1) at its precision")

    quotients = []
    truncated = False
    for _ in range(depth):
        if lo <= 0:
            # interval touches an exact rational tail: cannot certify further
            truncated = True
            break
        a_hi = math.floor(Fraction(1) / hi)
        a_lo = math.floor(Fraction(1) / lo)
        if a_hi != a_lo:
            truncated = True
            break
        a = int(a_lo)
        quotients.append(a)
        lo, hi = Fraction(1) / hi - a, Fraction(1) / lo - a

    if len(quotients) < 3:
        raise PrecisionExhausted(
            "only %d quotients certified at input precision" % len(quotients)
        )

    pq = _convergents_full(quotients)[: len(quotients)]
    tail = (lo + hi) / 2
    if tail <= 0:
        tail = hi / 2 if hi > 0 else Fraction(0)
    # reconstruct the midpoint value of alpha from the residual interval
    value = _cf_value(quotients, tail)
    freq = Frequency(
        value=value,
        partial_quotients=quotients,
        convergents=pq,
        truncated=truncated,
    )
    if len(pq) >= 4:
        freq.beta_hat = beta_estimate(freq)
    return freq


def _cf_value(quotients, tail: Fraction) -> Fraction:
    """Value of [0; a_1, a_2, ..., a_M + tail] by backward recurrence."""
    x = tail
    for a in reversed(quotients):
        x = Fraction(1) / (a + x)
    return x


def beta_estimate(freq: Frequency, window=None) -> float:
    """Finite-depth proxy for the denominator growth exponent.

    Returns max of ln(q_{n+1})/q_n over the tail window (default: the last
    ceil(M/2) indices).  A limsup surrogate only; reported as an estimate.
    """
    pq = freq.convergents
    if len(pq) < 4:
        raise InsufficientDepth("need at least 4 convergents, have %d" % len(pq))
    qs = [q for _, q in pq]
    ratios = [math.log(qs[n + 1]) / qs[n] for n in range(len(qs) - 1)]
    m = len(freq.partial_quotients)
    w = window if window is not None else math.ceil(m / 2)
    w = max(1, min(w, len(ratios)))
    return max(ratios[-w:])


def circle_dist(x) -> float:
    """Distance from x to the nearest integer; lies in [0, 1/2]."""
    if isinstance(x, Fraction):
        n = round(x)
        return float(abs(x - n))
    x = float(x)
    return abs(x - round(x))


def golden_mean(depth: int = 12) -> Frequency:
    """(sqrt(5)-1)/2 expanded to the given depth."""
    return cf_expand((math.sqrt(5.0) - 1.0) / 2.0, depth)


def sqrt2_minus_1(depth: int = 5) -> Frequency:
    """sqrt(2)-1 expanded to the given depth."""
    return cf_expand(math.sqrt(2.0) - 1.0, depth)
