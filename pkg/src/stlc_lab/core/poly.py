"""
Exact multivariate polynomials over the rationals.

This is the algebraic substrate for every symbolic computation in stlc-lab:
coordinate functions, polynomial vector fields, Lie derivatives and brackets.
Coefficients are ``fractions.Fraction`` so no rounding ever happens inside a
``Poly``; floats only appear when a polynomial is evaluated at a float point.

Variables are written ``x1 .. xn`` in text but indexed from 0 in code
(``x1`` is axis 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import (
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from .errors import InputError

Exponents = Tuple[int, ...]
Scalar = Union[int, Fraction]
Point = Sequence[Union[int, float, Fraction]]


def as_rational(
    value: Union[int, float, str, Fraction], max_denominator: Optional[int] = None
) -> Fraction:
    """
    Convert a number to an exact ``Fraction``.

    Strings and floats are read as finite decimals (``0.1`` becomes ``1/10``,
    not the nearest binary double). ``max_denominator`` optionally rounds the
    result to a nearby rational with a bounded denominator.
    """
    if isinstance(value, bool):
        raise InputError(f"Expected a number, got {value!r}")
    if isinstance(value, Fraction):
        result = value
    elif isinstance(value, int):
        result = Fraction(value)
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise InputError(f"Cannot convert {value!r} to a rational")
        result = Fraction(repr(value))
    elif isinstance(value, str):
        try:
            result = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"Not a rational literal: {value!r}") from e
    elif isinstance(value, Rational):
        result = Fraction(value.numerator, value.denominator)
    else:
        raise InputError(f"Expected a number, got {type(value).__name__}")
    if max_denominator is not None:
        result = result.limit_denominator(max_denominator)
    return result


def _is_exact(point: Point) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in point)


class MultiIndex(tuple):
    """A tuple of non-negative integer exponents ``r = (r_1, ..., r_n)``."""

    def __new__(cls, entries: Iterable[int]) -> MultiIndex:
        values = tuple(int(e) for e in entries)
        if any(e < 0 for e in values):
            raise InputError(f"Multi-index entries must be non-negative: {values}")
        return super().__new__(cls, values)

    @property
    def order(self) -> int:
        """|r|, the sum of the entries."""
        return sum(self)

    def factorial(self) -> int:
        """r! = r_1! r_2! ... r_n!"""
        return math.prod(math.factorial(e) for e in self)

    def __repr__(self) -> str:
        return f"MultiIndex({tuple(self)})"


def graded_lex_key(exponents: Exponents) -> Tuple[int, Exponents]:
    """Sort key placing higher total degree first, then lexicographically larger."""
    return (-sum(exponents), tuple(-e for e in exponents))


def multi_indices(dim: int, max_order: int) -> Iterator[MultiIndex]:
    """All multi-indices of length ``dim`` with order at most ``max_order``."""

    def build(prefix: Tuple[int, ...], remaining: int, slots: int) -> Iterator[Tuple[int, ...]]:
        if slots == 0:
            yield prefix
            return
        for e in range(remaining + 1):
            yield from build(prefix + (e,), remaining - e, slots - 1)

    for entries in build((), max_order, dim):
        yield MultiIndex(entries)


class Poly:
    """
    Immutable polynomial in ``dim`` variables with rational coefficients.

    Terms are stored as a map from exponent tuples to non-zero ``Fraction``
    coefficients. Instances are hashable and compare by value.
    """

    __slots__ = ("dim", "_terms")

    def __init__(self, dim: int, terms: Optional[Mapping[Sequence[int], Scalar]] = None):
        if not isinstance(dim, int) or dim < 1:
            raise InputError(f"Polynomial dimension must be a positive integer, got {dim!r}")
        clean: Dict[Exponents, Fraction] = {}
        for exps, coeff in (terms or {}).items():
            key = tuple(int(e) for e in exps)
            if len(key) != dim:
                raise InputError(
                    f"Monomial {key} has length {len(key)}, expected {dim}"
                )
            if any(e < 0 for e in key):
                raise InputError(f"Negative exponent in monomial {key}")
            value = as_rational(coeff)
            if value:
                clean[key] = clean.get(key, Fraction(0)) + value
                if not clean[key]:
                    del clean[key]
        self.dim = dim
        self._terms = clean

    @classmethod
    def _from_clean(cls, dim: int, terms: Dict[Exponents, Fraction]) -> Poly:
        """Wrap an already canonical term map without re-validating it."""
        poly = cls.__new__(cls)
        poly.dim = dim
        poly._terms = terms
        return poly

    # Constructors

    @classmethod
    def zero(cls, dim: int) -> Poly:
        return cls(dim)

    @classmethod
    def constant(cls, value: Union[int, float, str, Fraction], dim: int) -> Poly:
        return cls(dim, {(0,) * dim: as_rational(value)})

    @classmethod
    def variable(cls, index: int, dim: int) -> Poly:
        """The coordinate function x_{index+1}."""
        if not 0 <= index < dim:
            raise InputError(f"Variable index {index} out of range for dimension {dim}")
        exps = [0] * dim
        exps[index] = 1
        return cls._from_clean(dim, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff: Scalar = 1) -> Poly:
        return cls(len(exponents), {tuple(exponents): coeff})

    # Inspection

    @property
    def terms(self) -> Mapping[Exponents, Fraction]:
        return MappingProxyType(self._terms)

    def sorted_terms(self) -> List[Tuple[Exponents, Fraction]]:
        """Terms in canonical graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda item: graded_lex_key(item[0]))

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.dim, Fraction(0))

    def coefficient(self, exponents: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exponents), Fraction(0))

    def truncate(self, max_degree: int) -> Poly:
        """Drop every term of total degree above ``max_degree``."""
        if self.degree <= max_degree:
            return self
        kept = {e: c for e, c in self._terms.items() if sum(e) <= max_degree}
        return Poly._from_clean(self.dim, kept)

    # Arithmetic

    def _check_dim(self, other: Poly) -> None:
        if other.dim != self.dim:
            raise InputError(
                f"Dimension mismatch: polynomial in {self.dim} variables "
                f"combined with one in {other.dim}"
            )

    def _coerce(self, other: object) -> Optional[Poly]:
        if isinstance(other, Poly):
            self._check_dim(other)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.constant(other, self.dim)
        return None

    def __add__(self, other: object) -> Poly:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        result = dict(self._terms)
        for exps, coeff in rhs._terms.items():
            value = result.get(exps, Fraction(0)) + coeff
            if value:
                result[exps] = value
            else:
                result.pop(exps, None)
        return Poly._from_clean(self.dim, result)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._from_clean(self.dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: object) -> Poly:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: object) -> Poly:
        lhs = self._coerce(other)
        if lhs is None:
            return NotImplemented
        return lhs - self

    def scale(self, factor: Union[int, float, str, Fraction]) -> Poly:
        value = as_rational(factor)
        if not value:
            return Poly.zero(self.dim)
        return Poly._from_clean(self.dim, {e: c * value for e, c in self._terms.items()})

    def __mul__(self, other: object) -> Poly:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check_dim(other)
        result: Dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                result[key] = result.get(key, Fraction(0)) + c1 * c2
        return Poly._from_clean(self.dim, {e: c for e, c in result.items() if c})

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> Poly:
        if not isinstance(exponent, int) or exponent < 0:
            raise InputError(f"Polynomial powers must be non-negative integers, got {exponent!r}")
        result = Poly.constant(1, self.dim)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.dim == other.dim and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"Poly({self.dim}, {self.to_text()!r})"

    def __str__(self) -> str:
        return self.to_text()

    # Calculus

    def derivative(self, axis: int) -> Poly:
        """Exact partial derivative with respect to variable ``axis`` (0-based)."""
        if not 0 <= axis < self.dim:
            raise InputError(f"Axis {axis} out of range for dimension {self.dim}")
        result: Dict[Exponents, Fraction] = {}
        for exps, coeff in self._terms.items():
            power = exps[axis]
            if power == 0:
                continue
            key = exps[:axis] + (power - 1,) + exps[axis + 1 :]
            result[key] = result.get(key, Fraction(0)) + coeff * power
        return Poly._from_clean(self.dim, {e: c for e, c in result.items() if c})

    def dpow(self, r: Sequence[int]) -> Poly:
        """D^r p: differentiate r_i times along each axis i."""
        index = MultiIndex(r)
        if len(index) != self.dim:
            raise InputError(
                f"Multi-index of length {len(index)} applied to a polynomial in {self.dim} variables"
            )
        result: Dict[Exponents, Fraction] = {}
        for exps, coeff in self._terms.items():
            if any(e < k for e, k in zip(exps, index)):
                continue
            factor = math.prod(
                math.factorial(e) // math.factorial(e - k) for e, k in zip(exps, index)
            )
            key = tuple(e - k for e, k in zip(exps, index))
            result[key] = result.get(key, Fraction(0)) + coeff * factor
        return Poly._from_clean(self.dim, {e: c for e, c in result.items() if c})

    def integrate(self, axis: int) -> Poly:
        """Antiderivative along ``axis`` with zero constant of integration."""
        if not 0 <= axis < self.dim:
            raise InputError(f"Axis {axis} out of range for dimension {self.dim}")
        result: Dict[Exponents, Fraction] = {}
        for exps, coeff in self._terms.items():
            power = exps[axis] + 1
            key = exps[:axis] + (power,) + exps[axis + 1 :]
            result[key] = coeff / power
        return Poly._from_clean(self.dim, result)

    # Evaluation and substitution

    def evaluate(self, point: Point) -> Union[Fraction, float]:
        """
        Evaluate at ``point``.

        The result is an exact ``Fraction`` when every coordinate is an int or
        ``Fraction``; otherwise it is computed in floating point.
        """
        if len(point) != self.dim:
            raise InputError(
                f"Point of length {len(point)} given to a polynomial in {self.dim} variables"
            )
        if _is_exact(point):
            exact = [Fraction(v) for v in point]
            total = Fraction(0)
            for exps, coeff in self._terms.items():
                term = coeff
                for value, power in zip(exact, exps):
                    if power:
                        term *= value**power
                total += term
            return total
        values = [float(v) for v in point]
        acc = 0.0
        for exps, coeff in self._terms.items():
            term = float(coeff)
            for value, power in zip(values, exps):
                if power:
                    term *= value**power
            acc += term
        return acc

    def translate(self, offset: Point) -> Poly:
        """Exact p(x + offset) by binomial expansion."""
        if len(offset) != self.dim:
            raise InputError(
                f"Offset of length {len(offset)} given to a polynomial in {self.dim} variables"
            )
        shifts = [as_rational(v) for v in offset]
        result = Poly.zero(self.dim)
        for exps, coeff in self._terms.items():
            term = Poly.constant(coeff, self.dim)
            for axis, power in enumerate(exps):
                if power:
                    shifted = Poly.variable(axis, self.dim) + shifts[axis]
                    term = term * shifted**power
            result = result + term
        return result

    # Rendering

    def to_text(self, prefix: str = "x") -> str:
        """
        Canonical text: graded-lex order, ``a/b`` coefficients, ``^`` powers.

        Example: ``3/2*x1^2*x2 - x3``.
        """
        if not self._terms:
            return "0"
        pieces: List[str] = []
        for position, (exps, coeff) in enumerate(self.sorted_terms()):
            factors = [
                f"{prefix}{axis + 1}" if power == 1 else f"{prefix}{axis + 1}^{power}"
                for axis, power in enumerate(exps)
                if power
            ]
            magnitude = abs(coeff)
            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = f"{magnitude}*" + "*".join(factors)
            if position == 0:
                pieces.append(f"-{body}" if coeff < 0 else body)
            else:
                pieces.append(f" - {body}" if coeff < 0 else f" + {body}")
        return "".join(pieces)


@dataclass(frozen=True)
class PolyVectorField:
    """A polynomial vector field on R^n: one ``Poly`` per coordinate."""

    components: Tuple[Poly, ...]

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        if not comps:
            raise InputError("A vector field needs at least one component")
        dim = len(comps)
        for index, comp in enumerate(comps):
            if not isinstance(comp, Poly):
                raise InputError(f"Component {index + 1} is not a polynomial")
            if comp.dim != dim:
                raise InputError(
                    f"Component {index + 1} has dimension {comp.dim}, expected {dim}"
                )
        object.__setattr__(self, "components", comps)

    @classmethod
    def zero(cls, dim: int) -> PolyVectorField:
        return cls(tuple(Poly.zero(dim) for _ in range(dim)))

    @classmethod
    def from_terms(cls, components: Sequence[Mapping[Sequence[int], Scalar]]) -> PolyVectorField:
        dim = len(components)
        return cls(tuple(Poly(dim, terms) for terms in components))

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def degree(self) -> int:
        return max(comp.degree for comp in self.components)

    def is_zero(self) -> bool:
        return all(comp.is_zero() for comp in self.components)

    def _check_dim(self, other: PolyVectorField) -> None:
        if other.dim != self.dim:
            raise InputError(
                f"Dimension mismatch: vector fields on R^{self.dim} and R^{other.dim}"
            )

    def __add__(self, other: PolyVectorField) -> PolyVectorField:
        self._check_dim(other)
        return PolyVectorField(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: PolyVectorField) -> PolyVectorField:
        self._check_dim(other)
        return PolyVectorField(tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> PolyVectorField:
        return PolyVectorField(tuple(-c for c in self.components))

    def scale(self, factor: Union[int, float, str, Fraction]) -> PolyVectorField:
        return PolyVectorField(tuple(c.scale(factor) for c in self.components))

    def apply(self, f: Poly) -> Poly:
        """The derivation V̂ acting on ``f``."""
        return lie_derivative(self, f)

    def evaluate(self, point: Point) -> List[Union[Fraction, float]]:
        return [comp.evaluate(point) for comp in self.components]

    def translate(self, offset: Point) -> PolyVectorField:
        return PolyVectorField(tuple(c.translate(offset) for c in self.components))

    def to_text(self) -> List[str]:
        return [comp.to_text() for comp in self.components]


def poly_eval(p: Poly, x: Point) -> Union[Fraction, float]:
    return p.evaluate(x)


def poly_dpow(p: Poly, r: Sequence[int]) -> Poly:
    return p.dpow(r)


def lie_derivative(V: PolyVectorField, f: Poly) -> Poly:
    """L_V f = sum_j V^j * df/dx_j, computed exactly."""
    if V.dim != f.dim:
        raise InputError(
            f"Dimension mismatch: vector field on R^{V.dim} applied to a function on R^{f.dim}"
        )
    result = Poly.zero(f.dim)
    for axis, comp in enumerate(V.components):
        if comp.is_zero():
            continue
        partial = f.derivative(axis)
        if partial.is_zero():
            continue
        result = result + comp * partial
    return result


def lie_bracket(V: PolyVectorField, W: PolyVectorField) -> PolyVectorField:
    """[V, W]^i = L_V W^i - L_W V^i."""
    if V.dim != W.dim:
        raise InputError(
            f"Dimension mismatch: cannot bracket fields on R^{V.dim} and R^{W.dim}"
        )
    return PolyVectorField(
        tuple(
            lie_derivative(V, w) - lie_derivative(W, v)
            for v, w in zip(V.components, W.components)
        )
    )
