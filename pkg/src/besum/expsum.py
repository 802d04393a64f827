"""Partial exponential sums, running supremum traces, and classical bounds.

Angles are measured in turns: e(t) = exp(2*pi*i*t).  Callers are
responsible for reducing n*alpha mod 1 exactly before terms reach the
accumulator; reduction is where precision dies for huge n, and only
construction-aware callers can do it exactly.  Accumulation itself is
float64 with Kahan compensation, so roundoff stays far below the 1e-9
tolerances used throughout.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

from .factoradic import FactoradicReal, Tail, decode

TWO_PI = 2.0 * math.pi

AngleLike = Union[Fraction, FactoradicReal, "Angle"]


def e(t: float) -> complex:
    """exp(2 pi i t) for t in turns."""
    return cmath.exp(complex(0.0, TWO_PI * t))


class Angle:
    """An angle alpha in (0,1), held exactly as a rational or a factoradic value.

    Keeps a float64 rendering for term evaluation; the exact carrier is
    used whenever a caller needs n*alpha reduced mod 1 without error.
    """

    def __init__(self, value: AngleLike):
        if isinstance(value, Angle):
            value = value.exact
        if isinstance(value, FactoradicReal):
            lower, upper = decode(value)
            if upper <= 0 or lower >= 1 or (lower == 0 and value.tail is Tail.ZERO):
                raise ValueError("angle must lie in (0,1)")
            self.exact = value
            self._float = float(lower)
            self.rational = lower if value.tail is Tail.ZERO else None
        else:
            value = Fraction(value)
            if not (0 < value < 1):
                raise ValueError(f"angle {value} outside (0,1)")
            self.exact = value
            self._float = float(value)
            self.rational = value

    def __float__(self) -> float:
        return self._float

    def times_mod1(self, n: int) -> Fraction:
        """n*alpha reduced mod 1, exactly (rational angles only)."""
        if self.rational is None:
            raise ValueError("exact reduction needs a rational angle")
        p, q = self.rational.numerator, self.rational.denominator
        return Fraction(n * p % q, q)

    def complement(self) -> "Angle":
        """1 - alpha (rational angles only)."""
        if self.rational is None:
            raise ValueError("complement needs a rational angle")
        return Angle(1 - self.rational)

    def __repr__(self) -> str:
        return f"Angle({self.exact!r})"


@dataclass
class SumTrace:
    """Running exponential-sum state with prefix-supremum tracking.

    The sup is over all prefixes consumed so far, with the first
    attaining index recorded; the current modulus may be smaller.
    A single trace must not be advanced from two workers at once.
    """

    re: float = 0.0
    im: float = 0.0
    count: int = 0
    sup_modulus: float = 0.0
    sup_at: int = 0
    _re_c: float = field(default=0.0, repr=False)  # Kahan carries
    _im_c: float = field(default=0.0, repr=False)

    @property
    def partial_sum(self) -> complex:
        return complex(self.re, self.im)

    @property
    def modulus(self) -> float:
        return abs(self.partial_sum)

    def add_unit(self, z: complex) -> None:
        """Accumulate one unit-modulus term (Kahan-compensated)."""
        y = z.real + self._re_c
        t = self.re + y
        self._re_c = y - (t - self.re)
        self.re = t
        y = z.imag + self._im_c
        t = self.im + y
        self._im_c = y - (t - self.im)
        self.im = t
        self.count += 1
        m = math.hypot(self.re, self.im)
        if m > self.sup_modulus:
            self.sup_modulus = m
            self.sup_at = self.count

    def add_turns(self, t: float | Fraction) -> None:
        self.add_unit(e(float(t)))

    def copy(self) -> "SumTrace":
        return SumTrace(self.re, self.im, self.count, self.sup_modulus, self.sup_at,
                        self._re_c, self._im_c)


def stream_sum(terms: Iterable[float | Fraction], trace: SumTrace | None = None) -> SumTrace:
    """Advance a trace by the given terms (angles in turns, already reduced mod 1)."""
    if trace is None:
        trace = SumTrace()
    for t in terms:
        trace.add_turns(t)
    return trace


def dirichlet_bound(alpha: AngleLike) -> float:
    """2/|e(alpha)-1| = 1/sin(pi*alpha), the geometric-series bound."""
    a = float(Angle(alpha))
    return 1.0 / math.sin(math.pi * a)


def full_interval_sum(alpha: AngleLike, n_terms: int) -> complex:
    """sum_{n<=N} e(n*alpha) by the closed form (e((N+1)a) - e(a)) / (e(a) - 1)."""
    angle = Angle(alpha)
    if n_terms < 1:
        raise ValueError("N must be >= 1")
    if angle.rational is not None:
        top = e(float(angle.times_mod1(n_terms + 1))) - e(float(angle.times_mod1(1)))
    else:
        a = float(angle)
        top = e(math.fmod((n_terms + 1) * a, 1.0)) - e(a)
    return top / (e(float(angle)) - 1.0)


def sum_over_set(elements: Iterable[int], alpha: AngleLike, n_max: int) -> SumTrace:
    """S_A(alpha, N): sum of e(n*alpha) over elements n <= n_max, with sup trace."""
    angle = Angle(alpha)
    trace = SumTrace()
    for n in elements:
        if n > n_max:
            continue
        if angle.rational is not None:
            trace.add_turns(angle.times_mod1(n))
        else:
            trace.add_turns(math.fmod(n * float(angle), 1.0))
    return trace


def symmetry_check(elements: Iterable[int], alpha: AngleLike, n_max: int) -> tuple[complex, complex]:
    """(conj S_A(alpha,N), S_A(1-alpha,N)); the two agree for any finite A."""
    angle = Angle(alpha)
    elems = [n for n in elements if n <= n_max]
    lhs = sum_over_set(elems, angle, n_max).partial_sum.conjugate()
    rhs = sum_over_set(elems, angle.complement(), n_max).partial_sum
    return lhs, rhs


def qn_counterexample_sup(q: int, alpha: AngleLike, n_max: int) -> float:
    """sup_{N <= n_max} |S_{ {qn} }(alpha, N)|.

    Bounded (geometric series) when q*alpha is not an integer; grows like
    N/q when alpha = p/q, since every term is then e(0) = 1.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    angle = Angle(alpha)
    trace = SumTrace()
    for k in range(1, n_max // q + 1):
        if angle.rational is not None:
            trace.add_turns(angle.times_mod1(k * q))
        else:
            trace.add_turns(math.fmod(k * q * float(angle), 1.0))
    return trace.sup_modulus


def csv_row(alpha: Angle, trace: SumTrace) -> dict:
    """One result row for the CSV interface."""
    row = {
        "N": trace.count,
        "re": trace.re,
        "im": trace.im,
        "modulus": trace.modulus,
        "empirical_sup": trace.sup_modulus,
        "sup_at": trace.sup_at,
    }
    if alpha.rational is not None:
        row["alpha_num"] = alpha.rational.numerator
        row["alpha_den"] = alpha.rational.denominator
    return row
