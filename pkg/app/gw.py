# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Grothendieck-Witt and Witt ring arithmetic with etale trace maps.

Forms are finite sums of rank-1 classes <a> plus a number of hyperbolic
planes h. Square classes are rational (sign times a squarefree magnitude)
possibly multiplied by named symbolic units ("atoms") whose square class is
unknown. Equality is equality of canonical forms: classes sorted, and every
pair <a> + <-a> replaced by h.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, total_ordering
from math import gcd
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import sympy as sp

from app.errors import (
    IndeterminateSignatureError,
    InvalidInputError,
    NonEtaleInputError,
)

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


@lru_cache(maxsize=4096)
def squarefree_part(n: int) -> int:
    """Return the squarefree kernel of a positive integer."""
    if n <= 0:
        raise InvalidInputError(f"squarefree part needs a positive integer, got {n}")
    part = 1
    for prime, exponent in sp.factorint(n).items():
        if exponent % 2:
            part *= int(prime)
    return part


@total_ordering
@dataclass(frozen=True)
class SquareClass:
    """A class in k^x / (k^x)^2: sign, squarefree magnitude and atoms."""

    sign: int = 1
    magnitude: int = 1
    atoms: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise InvalidInputError(f"sign must be +1 or -1, got {self.sign}")
        if self.magnitude < 1 or squarefree_part(self.magnitude) != self.magnitude:
            raise InvalidInputError(
                f"magnitude must be a squarefree positive integer, got {self.magnitude}"
            )
        atoms = tuple(sorted(self.atoms))
        if len(set(atoms)) != len(atoms):
            raise InvalidInputError(f"atoms must be distinct, got {self.atoms}")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def of(cls, value: Rational, atoms: Iterable[str] = ()) -> "SquareClass":
        """Square class of a nonzero rational, optionally times atoms."""
        value = Fraction(value)
        if value == 0:
            raise InvalidInputError("zero has no square class")
        sign = 1 if value > 0 else -1
        magnitude = squarefree_part(abs(value.numerator) * value.denominator)
        reduced: Counter = Counter(atoms)
        odd_atoms = tuple(name for name, count in reduced.items() if count % 2)
        return cls(sign, magnitude, odd_atoms)

    @classmethod
    def atom(cls, name: str, sign: int = 1) -> "SquareClass":
        return cls(sign, 1, (name,))

    @property
    def is_rational(self) -> bool:
        return not self.atoms

    def _key(self) -> Tuple[Tuple[str, ...], int, int]:
        return (self.atoms, self.magnitude, -self.sign)

    def __lt__(self, other: "SquareClass") -> bool:
        if not isinstance(other, SquareClass):
            return NotImplemented
        return self._key() < other._key()

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        common = gcd(self.magnitude, other.magnitude)
        magnitude = (self.magnitude // common) * (other.magnitude // common)
        atoms = tuple(sorted(set(self.atoms) ^ set(other.atoms)))
        return SquareClass(self.sign * other.sign, magnitude, atoms)

    def __neg__(self) -> "SquareClass":
        return SquareClass(-self.sign, self.magnitude, self.atoms)

    def times(self, value: Rational) -> "SquareClass":
        """Multiply by a nonzero rational."""
        return self * SquareClass.of(value)

    def has_atom(self, name: str) -> bool:
        return name in self.atoms

    def without(self, name: str) -> "SquareClass":
        """Drop one atom (the class divided by that unit, up to squares)."""
        return SquareClass(
            self.sign, self.magnitude, tuple(a for a in self.atoms if a != name)
        )

    def to_dict(self) -> Dict[str, Any]:
        return {"sign": self.sign, "mag": self.magnitude, "atoms": list(self.atoms)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SquareClass":
        try:
            return cls(int(data["sign"]), int(data["mag"]), tuple(data["atoms"]))
        except (KeyError, TypeError) as e:
            raise InvalidInputError(f"Invalid square class record {data!r}: {e}")

    def __str__(self) -> str:
        factors = [str(self.magnitude)] if self.magnitude != 1 or not self.atoms else []
        factors.extend(self.atoms)
        body = "*".join(factors)
        return f"<-{body}>" if self.sign < 0 else f"<{body}>"


ONE = SquareClass()
MINUS_ONE = SquareClass(-1)


@dataclass(frozen=True)
class GWForm:
    """A virtual form: multiset of rank-1 classes plus hyper copies of h.

    Instances built through the module operations are always reduced.
    """

    classes: Tuple[SquareClass, ...] = ()
    hyper: int = 0

    def __post_init__(self) -> None:
        if self.hyper < 0:
            raise InvalidInputError(f"hyperbolic count must be nonnegative: {self.hyper}")
        object.__setattr__(self, "classes", tuple(sorted(self.classes)))

    @classmethod
    def of(cls, *classes: SquareClass, hyper: int = 0) -> "GWForm":
        return reduce(cls(tuple(classes), hyper))

    @classmethod
    def diagonal(cls, values: Iterable[Rational]) -> "GWForm":
        """Reduced form of a diagonal quadratic form over Q."""
        return reduce(cls(tuple(SquareClass.of(v) for v in values)))

    @classmethod
    def hyperbolic(cls, count: int = 1) -> "GWForm":
        return cls((), count)

    def __add__(self, other: "GWForm") -> "GWForm":
        return add(self, other)

    def __mul__(self, other: "GWForm") -> "GWForm":
        return mul(self, other)

    def scaled(self, n: int) -> "GWForm":
        """n-fold direct sum of the form (n >= 0)."""
        if n < 0:
            raise InvalidInputError(f"cannot take a negative multiple {n}")
        return reduce(GWForm(self.classes * n, self.hyper * n))

    @property
    def rank(self) -> int:
        return rank(self)

    @property
    def signature(self) -> int:
        return signature(self)

    @property
    def is_rational(self) -> bool:
        return all(c.is_rational for c in self.classes)

    def atoms(self) -> List[str]:
        names = set()
        for c in self.classes:
            names.update(c.atoms)
        return sorted(names)

    def pretty(self, compact: bool = False) -> str:
        """Human readable form such as ``240<1> + 190h``."""
        parts = []
        for square_class, count in sorted(Counter(self.classes).items()):
            parts.append(f"{count}{square_class}" if count > 1 else str(square_class))
        if self.hyper:
            parts.append(f"{self.hyper}h" if self.hyper > 1 else "h")
        if not parts:
            return "0"
        return ("+" if compact else " + ").join(parts)

    def __str__(self) -> str:
        return self.pretty()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "classes": [c.to_dict() for c in self.classes],
            "hyper": self.hyper,
            "rank": self.rank,
            "signature": self.signature if self.is_rational else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GWForm":
        try:
            classes = tuple(SquareClass.from_dict(c) for c in data["classes"])
            return reduce(cls(classes, int(data["hyper"])))
        except (KeyError, TypeError) as e:
            raise InvalidInputError(f"Invalid form record: {e}")


def reduce(f: GWForm) -> GWForm:
    """Canonical form: cancel every pair <a> + <-a> into one h."""
    counts = Counter(f.classes)
    hyper = f.hyper
    for square_class in sorted(counts):
        if square_class.sign < 0:
            continue
        partner = -square_class
        pairs = min(counts[square_class], counts.get(partner, 0))
        if pairs:
            counts[square_class] -= pairs
            counts[partner] -= pairs
            hyper += pairs
    classes = tuple(counts.elements())
    return GWForm(classes, hyper)


def add(f: GWForm, g: GWForm) -> GWForm:
    return reduce(GWForm(f.classes + g.classes, f.hyper + g.hyper))


def mul(f: GWForm, g: GWForm) -> GWForm:
    """Tensor product: <a><b> = <ab>, <a>h = h, h*h = 2h."""
    classes = tuple(a * b for a in f.classes for b in g.classes)
    hyper = (
        len(f.classes) * g.hyper + f.hyper * len(g.classes) + 2 * f.hyper * g.hyper
    )
    return reduce(GWForm(classes, hyper))


def rank(f: GWForm) -> int:
    return len(f.classes) + 2 * f.hyper


def signature(f: GWForm) -> int:
    """Sum of signs; only defined when no symbolic atoms are present."""
    if not f.is_rational:
        raise IndeterminateSignatureError(
            f"indeterminate signature: form {f.pretty()} has symbolic atoms"
        )
    return sum(c.sign for c in f.classes)


def witt_image(f: GWForm) -> GWForm:
    """Class in W(k) = GW(k)/Z*h, represented by its anisotropic classes."""
    return GWForm(reduce(f).classes, 0)


def from_witt(w: GWForm, total_rank: int) -> GWForm:
    """Recombine a Witt class with an exact rank into a GW form."""
    missing = total_rank - len(w.classes)
    if missing < 0 or missing % 2:
        raise InvalidInputError(
            f"rank {total_rank} is incompatible with Witt class {w.pretty()}"
        )
    return reduce(GWForm(w.classes, missing // 2))


@dataclass(frozen=True)
class ExtensionStep:
    """M = L[x]/(x^m - D) with x named by ``generator``."""

    degree: int
    radicand: SquareClass = field(default_factory=SquareClass)
    generator: str = "x"

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise InvalidInputError(f"extension degree must be >= 1, got {self.degree}")


def trace_step(step: ExtensionStep, c: SquareClass, uses_generator: bool) -> GWForm:
    """Trace of <c> (or <c*x> when uses_generator) from M down to L."""
    if c.has_atom(step.generator):
        raise InvalidInputError(
            f"class {c} still contains generator {step.generator}; strip it first"
        )
    m = step.degree
    base = c.times(m)
    if not uses_generator:
        if m % 2:
            return GWForm.of(base, hyper=(m - 1) // 2)
        return GWForm.of(base, base * step.radicand, hyper=(m - 2) // 2)
    if m % 2:
        return GWForm.of(base * step.radicand, hyper=(m - 1) // 2)
    return GWForm.hyperbolic(m // 2)


def trace_h(step: ExtensionStep) -> GWForm:
    return GWForm.hyperbolic(step.degree)


def trace_form(step: ExtensionStep, f: GWForm) -> GWForm:
    """Trace a whole form through one step, class by class."""
    total = GWForm.hyperbolic(step.degree * f.hyper)
    for square_class in f.classes:
        uses_generator = square_class.has_atom(step.generator)
        stripped = square_class.without(step.generator)
        total = total + trace_step(step, stripped, uses_generator)
    return total


@lru_cache(maxsize=256)
def _power_traces(m: int, D: Fraction, count: int) -> Tuple[sp.Rational, ...]:
    """Tr(x^e) for e < count, as traces of companion matrix powers."""
    companion = sp.zeros(m, m)
    for i in range(1, m):
        companion[i, i - 1] = 1
    companion[0, m - 1] = sp.Rational(D.numerator, D.denominator)
    traces = []
    power = sp.eye(m)
    for _ in range(count):
        traces.append(power.trace())
        power = power * companion
    return tuple(traces)


def _diagonalize(gram: sp.Matrix) -> List[sp.Rational]:
    """Congruence-diagonalize a nondegenerate symmetric rational matrix."""
    g = gram.copy()
    active = list(range(g.rows))
    diagonal = []
    while active:
        pivot: Optional[int] = next((i for i in active if g[i, i] != 0), None)
        if pivot is None:
            pair = next(
                ((i, j) for i in active for j in active if i < j and g[i, j] != 0),
                None,
            )
            if pair is None:
                raise NonEtaleInputError("non-etale input: degenerate Gram matrix")
            i, j = pair
            for k in active:
                g[i, k] += g[j, k]
            for k in active:
                g[k, i] += g[k, j]
            pivot = i
        a = g[pivot, pivot]
        diagonal.append(a)
        active.remove(pivot)
        row = {k: g[pivot, k] for k in active}
        for k in active:
            for l in active:
                g[k, l] -= row[k] * row[l] / a
    return diagonal


def trace_oracle(m: int, D: Rational, c: Rational, power: int = 0) -> GWForm:
    """Trace form of <c*x^power> on Q[x]/(x^m - D) by brute force."""
    D, c = Fraction(D), Fraction(c)
    if m < 1 or D == 0 or c == 0 or power < 0:
        raise InvalidInputError(f"bad oracle input m={m}, D={D}, c={c}, power={power}")
    traces = _power_traces(m, D, power + 2 * m - 1)
    scale = sp.Rational(c.numerator, c.denominator)
    gram = sp.Matrix(m, m, lambda j, k: scale * traces[power + j + k])
    if gram.det() == 0:
        raise NonEtaleInputError(f"non-etale input: x^{m} - {D} gives a degenerate form")
    values = [Fraction(int(v.p), int(v.q)) for v in _diagonalize(gram)]
    return GWForm.diagonal(values)
