"""Exact sparse polynomials in z1, z2, conj(z1), conj(z2) and the CR operators.

A polynomial is a finite map from monomials ``z1^a1 z2^a2 zb1^b1 zb2^b2`` to
exact complex-rational coefficients. Zero coefficients are never stored, so
two polynomials are equal iff their term maps are equal.

The tangential operators on the sphere are

    L    = zb1 d/dz2 - zb2 d/dz1
    Lbar = z1 d/dzb2 - z2 d/dzb1

and the perturbed Kohn Laplacian with parameter t, |t| < 1, expands to

    box_b^t = -h (L Lbar + |t|^2 Lbar L + t L^2 + conj(t) Lbar^2),
    h = (1 + |t|^2) / (1 - |t|^2)^2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple

import numpy as np

__all__ = [
    "ComplexRational",
    "Monomial",
    "Polynomial",
    "RossiParam",
    "VARIABLES",
    "apply_L",
    "apply_Lbar",
    "apply_boxb",
    "apply_boxbt",
    "as_coefficient",
    "derive",
    "format_coefficient",
    "laplacian",
    "monomial_sphere_integral",
    "parse_coefficient",
    "sphere_inner_product",
]

VARIABLES = ("z1", "z2", "zb1", "zb2")

@dataclass(frozen=True, slots=True)
class ComplexRational:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.re, Fraction):
            object.__setattr__(self, "re", Fraction(self.re))
        if not isinstance(self.im, Fraction):
            object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def _make(cls, re: Fraction, im: Fraction) -> "ComplexRational":
        # skips __post_init__ coercion; callers guarantee Fractions
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __add__(self, other):
        o = as_coefficient(other)
        return ComplexRational._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexRational._make(-self.re, -self.im)

    def __sub__(self, other):
        o = as_coefficient(other)
        return ComplexRational._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return as_coefficient(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ComplexRational._make(self.re * other, self.im * other)
        o = as_coefficient(other)
        if not o.im and not self.im:
            return ComplexRational._make(self.re * o.re, Fraction(0))
        return ComplexRational._make(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = as_coefficient(other)
        if not o:
            raise ZeroDivisionError("division by zero ComplexRational")
        if not o.im:
            return ComplexRational._make(self.re / o.re, self.im / o.re)
        return self * o.conjugate() * ComplexRational._make(1 / o.abs2(), Fraction(0))

    def __rtruediv__(self, other):
        return as_coefficient(other) / self

    def __eq__(self, other):
        try:
            o = as_coefficient(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def conjugate(self) -> "ComplexRational":
        return ComplexRational._make(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return not self.im

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"ComplexRational({format_coefficient(self)})"

    def __str__(self) -> str:
        return format_coefficient(self)


_ZERO = ComplexRational._make(Fraction(0), Fraction(0))
_ONE = ComplexRational._make(Fraction(1), Fraction(0))


def as_coefficient(value) -> ComplexRational:
    """Coerce int, Fraction, str or ComplexRational into a ComplexRational.

    Floats are refused on purpose: they would silently bring rounding into
    exact arithmetic.
    """
    if isinstance(value, ComplexRational):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(value, (int, Fraction)):
        return ComplexRational._make(Fraction(value), Fraction(0))
    if isinstance(value, str):
        return parse_coefficient(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


def _format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_coefficient(c: ComplexRational) -> str:
    """``p/q`` for real values, ``(re, im)`` otherwise."""
    if not c.im:
        return _format_fraction(c.re)
    return f"({_format_fraction(c.re)}, {_format_fraction(c.im)})"


def parse_coefficient(text: str) -> ComplexRational:
    text = text.strip()
    if text.startswith("("):
        if not text.endswith(")"):
            raise ValueError(f"unbalanced complex coefficient: {text!r}")
        parts = text[1:-1].split(",")
        if len(parts) != 2:
            raise ValueError(f"complex coefficient needs two parts: {text!r}")
        return ComplexRational(Fraction(parts[0].strip()), Fraction(parts[1].strip()))
    return ComplexRational._make(Fraction(text), Fraction(0))


class Monomial(NamedTuple):
    """Exponents of z1^a1 z2^a2 zb1^b1 zb2^b2."""

    a1: int = 0
    a2: int = 0
    b1: int = 0
    b2: int = 0

    @property
    def p(self) -> int:
        """Holomorphic degree."""
        return self.a1 + self.a2

    @property
    def q(self) -> int:
        """Antiholomorphic degree."""
        return self.b1 + self.b2

    @property
    def degree(self) -> int:
        return self.a1 + self.a2 + self.b1 + self.b2

    @property
    def bidegree(self) -> tuple[int, int]:
        return (self.a1 + self.a2, self.b1 + self.b2)

    def __mul__(self, other):  # type: ignore[override]
        if not isinstance(other, Monomial):
            return NotImplemented
        return Monomial(
            self.a1 + other.a1, self.a2 + other.a2, self.b1 + other.b1, self.b2 + other.b2
        )

    def render(self) -> str:
        parts = []
        for name, e in zip(VARIABLES, self):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return " ".join(parts)


class Polynomial:
    """Immutable sparse polynomial with exact complex-rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Monomial, ComplexRational] = {}
        for mono, coeff in items:
            c = as_coefficient(coeff)
            if c:
                mono = mono if isinstance(mono, Monomial) else Monomial(*mono)
                if any(e < 0 for e in mono):
                    raise ValueError(f"negative exponent in {mono}")
                prev = clean.get(mono)
                if prev is not None:
                    c = prev + c
                    if not c:
                        del clean[mono]
                        continue
                clean[mono] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _from_clean(cls, terms: dict) -> "Polynomial":
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls({Monomial(): c})

    @classmethod
    def monomial(cls, a1=0, a2=0, b1=0, b2=0, coeff=1) -> "Polynomial":
        return cls({Monomial(a1, a2, b1, b2): coeff})

    @classmethod
    def variable(cls, name: str) -> "Polynomial":
        exps = [0, 0, 0, 0]
        exps[_var_index(name)] = 1
        return cls({Monomial(*exps): 1})

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls._from_clean({})

    @property
    def terms(self) -> Mapping[Monomial, ComplexRational]:
        return MappingProxyType(self._terms)

    def __iter__(self) -> Iterator[tuple[Monomial, ComplexRational]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, mono) -> ComplexRational:
        return self._terms.get(Monomial(*mono), _ZERO)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        try:
            return self == Polynomial.constant(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        out = dict(self._terms)
        for mono, c in other._terms.items():
            prev = out.get(mono)
            if prev is None:
                out[mono] = c
            else:
                s = prev + c
                if s:
                    out[mono] = s
                else:
                    del out[mono]
        return Polynomial._from_clean(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._from_clean({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = as_coefficient(c)
        if not c:
            return Polynomial.zero()
        if not c.im:
            r = c.re
            return Polynomial._from_clean(
                {m: ComplexRational._make(v.re * r, v.im * r) for m, v in self._terms.items()}
            )
        return Polynomial._from_clean({m: v * c for m, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        out: dict[Monomial, ComplexRational] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 * m2
                prev = out.get(m)
                out[m] = c1 * c2 if prev is None else prev + c1 * c2
        return Polynomial._from_clean({m: c for m, c in out.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def conjugate(self) -> "Polynomial":
        """Complex conjugate: swaps z and zbar and conjugates coefficients."""
        return Polynomial._from_clean(
            {Monomial(m.b1, m.b2, m.a1, m.a2): c.conjugate() for m, c in self._terms.items()}
        )

    def bidegrees(self) -> set[tuple[int, int]]:
        return {m.bidegree for m in self._terms}

    @property
    def bidegree(self) -> tuple[int, int]:
        """The common (p, q) of all terms; undefined for zero or mixed polynomials."""
        if not self._terms:
            raise ValueError("the zero polynomial has no bidegree")
        bd = self.bidegrees()
        if len(bd) != 1:
            raise ValueError(f"polynomial has mixed bidegrees {sorted(bd)}")
        return next(iter(bd))

    def degrees(self) -> set[int]:
        return {m.degree for m in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def bidegree_part(self, p: int, q: int) -> "Polynomial":
        return Polynomial._from_clean(
            {m: c for m, c in self._terms.items() if m.bidegree == (p, q)}
        )

    def evaluate(self, z1, z2):
        """Numeric value at points (z1, z2); accepts numpy arrays."""
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.asarray(z2, dtype=complex)
        out = np.zeros(np.broadcast(z1, z2).shape, dtype=complex)
        zb1, zb2 = z1.conj(), z2.conj()
        for (a1, a2, b1, b2), c in self._terms.items():
            out = out + complex(c) * z1**a1 * z2**a2 * zb1**b1 * zb2**b2
        return out

    def sorted_terms(self) -> list[tuple[Monomial, ComplexRational]]:
        return sorted(self._terms.items(), key=lambda mc: tuple(mc[0]), reverse=True)

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({format_polynomial(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        return parse_polynomial(text)


def _var_index(name: str) -> int:
    try:
        return VARIABLES.index(name)
    except ValueError:
        raise ValueError(f"unknown variable {name!r}; expected one of {VARIABLES}") from None


# --------------------------------------------------------------------------
# text format


def format_polynomial(p: Polynomial) -> str:
    """Render as ``coeff * z1^a z2^b zb1^c zb2^d`` terms joined by `` + ``."""
    if p.is_zero():
        return "0"
    out = []
    for mono, c in p.sorted_terms():
        vars_ = mono.render()
        coeff = format_coefficient(c)
        out.append(f"{coeff} * {vars_}" if vars_ else coeff)
    return " + ".join(out)


_TERM_SPLIT = re.compile(r"\+(?![^()]*\))")
_FACTOR = re.compile(r"^(z1|z2|zb1|zb2)(?:\^(\d+))?$")


def parse_polynomial(text: str) -> Polynomial:
    """Inverse of :func:`format_polynomial`.

    Also accepts bare monomials (implicit coefficient 1) and repeated
    variables, which multiply.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial text")
    terms: list[tuple[Monomial, ComplexRational]] = []
    for chunk in _TERM_SPLIT.split(text):
        chunk = chunk.strip()
        if not chunk:
            raise ValueError(f"empty term in {text!r}")
        if "*" in chunk:
            coeff_text, vars_text = chunk.split("*", 1)
            coeff = parse_coefficient(coeff_text)
        elif chunk[0] in "z":
            coeff, vars_text = _ONE, chunk
        else:
            coeff, vars_text = parse_coefficient(chunk), ""
        exps = [0, 0, 0, 0]
        for factor in vars_text.split():
            mt = _FACTOR.match(factor)
            if mt is None:
                raise ValueError(f"bad factor {factor!r} in {chunk!r}")
            exps[_var_index(mt.group(1))] += int(mt.group(2) or 1)
        terms.append((Monomial(*exps), coeff))
    return Polynomial(terms)


# --------------------------------------------------------------------------
# differential operators


def derive(p: Polynomial, var: str) -> Polynomial:
    """Formal partial derivative with respect to one of z1, z2, zb1, zb2."""
    idx = _var_index(var)
    out: dict[Monomial, ComplexRational] = {}
    for mono, c in p:
        e = mono[idx]
        if e == 0:
            continue
        exps = list(mono)
        exps[idx] = e - 1
        out[Monomial(*exps)] = c * e
    return Polynomial._from_clean(out)


def _accumulate(out: dict, mono: Monomial, c: ComplexRational) -> None:
    prev = out.get(mono)
    out[mono] = c if prev is None else prev + c


def _finish(out: dict) -> Polynomial:
    return Polynomial._from_clean({m: c for m, c in out.items() if c})


def apply_L(p: Polynomial) -> Polynomial:
    """L = zb1 d/dz2 - zb2 d/dz1; shifts bidegree (p, q) to (p-1, q+1)."""
    out: dict[Monomial, ComplexRational] = {}
    for (a1, a2, b1, b2), c in p:
        if a2:
            _accumulate(out, Monomial(a1, a2 - 1, b1 + 1, b2), c * a2)
        if a1:
            _accumulate(out, Monomial(a1 - 1, a2, b1, b2 + 1), c * -a1)
    return _finish(out)


def apply_Lbar(p: Polynomial) -> Polynomial:
    """Lbar = z1 d/dzb2 - z2 d/dzb1; shifts bidegree (p, q) to (p+1, q-1)."""
    out: dict[Monomial, ComplexRational] = {}
    for (a1, a2, b1, b2), c in p:
        if b2:
            _accumulate(out, Monomial(a1 + 1, a2, b1, b2 - 1), c * b2)
        if b1:
            _accumulate(out, Monomial(a1, a2 + 1, b1 - 1, b2), c * -b1)
    return _finish(out)


def laplacian(p: Polynomial) -> Polynomial:
    """4 (d^2/dz1 dzb1 + d^2/dz2 dzb2)."""
    out: dict[Monomial, ComplexRational] = {}
    for (a1, a2, b1, b2), c in p:
        if a1 and b1:
            _accumulate(out, Monomial(a1 - 1, a2, b1 - 1, b2), c * (4 * a1 * b1))
        if a2 and b2:
            _accumulate(out, Monomial(a1, a2 - 1, b1, b2 - 1), c * (4 * a2 * b2))
    return _finish(out)


def apply_boxb(p: Polynomial) -> Polynomial:
    """Unperturbed Kohn Laplacian -L Lbar."""
    return -apply_L(apply_Lbar(p))


@dataclass(frozen=True)
class RossiParam:
    """Modulus |t| of the deformation parameter, exact and in [0, 1)."""

    t_abs: Fraction

    def __post_init__(self):
        t = self.t_abs
        if isinstance(t, float):
            raise TypeError("RossiParam needs an exact rational; pass a Fraction or 'p/q'")
        t = Fraction(t)
        if not 0 <= t < 1:
            raise ValueError(f"|t| must lie in [0, 1), got {t}")
        object.__setattr__(self, "t_abs", t)

    @classmethod
    def of(cls, value) -> "RossiParam":
        return value if isinstance(value, RossiParam) else cls(Fraction(value))

    @property
    def s(self) -> Fraction:
        """|t|^2."""
        return self.t_abs * self.t_abs

    @property
    def h(self) -> Fraction:
        return normalization(self.s)


def normalization(s: Fraction) -> Fraction:
    """h as a function of s = |t|^2."""
    return (1 + s) / (1 - s) ** 2


def apply_boxbt(p: Polynomial, t, *, factor_h: bool = False) -> Polynomial:
    """Apply the perturbed Kohn Laplacian.

    ``t`` is a :class:`RossiParam` (real, nonnegative parameter) or an exact
    complex coefficient with |t| < 1; the complex form is kept for the
    phase-invariance checks. With ``factor_h`` the leading factor h is
    omitted.
    """
    if isinstance(t, RossiParam):
        tc = as_coefficient(t.t_abs)
    else:
        tc = as_coefficient(t)
    s = tc.abs2()
    if s >= 1:
        raise ValueError("|t| must be < 1")
    Lb = apply_Lbar(p)
    Lp = apply_L(p)
    total = apply_L(Lb)
    if s:
        total = total + apply_Lbar(Lp).scale(s)
    if tc:
        total = total + apply_L(Lp).scale(tc) + apply_Lbar(Lb).scale(tc.conjugate())
    scale = Fraction(-1) if factor_h else -normalization(s)
    return total.scale(scale)


# --------------------------------------------------------------------------
# inner product on the unit sphere, unit-mass measure


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def monomial_sphere_integral(g1: int, g2: int) -> Fraction:
    """Average of |z1^g1 z2^g2|^2 over the unit sphere: g1! g2! / (g1+g2+1)!."""
    return Fraction(_factorial(g1) * _factorial(g2), _factorial(g1 + g2 + 1))


def sphere_inner_product(f: Polynomial, g: Polynomial) -> ComplexRational:
    """Mean of f * conj(g) over the unit sphere in C^2, in closed form.

    The product monomial z^gamma zbar^delta integrates to zero unless
    gamma == delta.
    """
    total_re = Fraction(0)
    total_im = Fraction(0)
    g_items = [(m, c.conjugate()) for m, c in g]
    for (a1, a2, b1, b2), cf in f:
        for (c1, c2, d1, d2), cg in g_items:
            # conj(z^c zbar^d) = z^d zbar^c
            g1 = a1 + d1
            g2 = a2 + d2
            if g1 != b1 + c1 or g2 != b2 + c2:
                continue
            w = monomial_sphere_integral(g1, g2)
            prod = cf * cg
            total_re += prod.re * w
            total_im += prod.im * w
    return ComplexRational._make(total_re, total_im)
