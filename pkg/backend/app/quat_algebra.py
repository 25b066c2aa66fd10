"""Totally definite quaternion algebras (-a,-b / K) and their elements.

Lattices live in the ambient Q-frame {1, w} (x) {1, i, j, ij}: coordinate index
``q * n + e`` holds the w^e part of the q-th quaternion component, n = [K:Q].
Since a, b are kept integral, the structure constants of this frame are integers
and lattice products run in pure integer arithmetic.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Sequence

from app.field_arith import BaseField, FieldElem, FieldIdeal, parse_elem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuatAlgebra:
    field: BaseField
    a: FieldElem
    b: FieldElem

    @property
    def degree(self) -> int:
        return self.field.degree

    @property
    def dim(self) -> int:
        return 4 * self.field.degree

    def elem(self, t=0, x=0, y=0, z=0) -> "QuatElem":
        K = self.field
        parts = [c if isinstance(c, FieldElem) else K.elem(c) for c in (t, x, y, z)]
        return QuatElem(self, *parts)

    @cached_property
    def one(self) -> "QuatElem":
        return self.elem(1)

    @cached_property
    def norm_coefficients(self) -> tuple[FieldElem, ...]:
        # n(t + xi + yj + zij) = t^2 + a x^2 + b y^2 + ab z^2
        return (self.field.one, self.a, self.b, self.a * self.b)

    @cached_property
    def _basis_powers(self) -> tuple[FieldElem, ...]:
        K = self.field
        return (K.one,) if K.degree == 1 else (K.one, K.omega)

    @cached_property
    def structure(self) -> tuple[tuple[int, int, int, int], ...]:
        """Nonzero integer structure constants (r, s, k, c): e_r * e_s = sum c e_k."""
        n = self.degree
        entries = []
        for r in range(self.dim):
            for s in range(self.dim):
                product = self.basis_element(r) * self.basis_element(s)
                for k, c in enumerate(product.vector()):
                    if c:
                        if c.denominator != 1:
                            raise ValueError("structure constants must be integral")
                        entries.append((r, s, k, int(c)))
        logger.debug(f"Algebra ({self.a},{self.b}) over {self.field}: {len(entries)} structure constants, n={n}")
        return tuple(entries)

    def basis_element(self, index: int) -> "QuatElem":
        n = self.degree
        q, e = divmod(index, n)
        parts = [self.field.zero] * 4
        parts[q] = self._basis_powers[e]
        return QuatElem(self, *parts)

    def mul_vectors(self, u: Sequence, v: Sequence) -> list:
        """Product of two ambient coordinate vectors."""
        out = [0] * self.dim
        for r, s, k, c in self.structure:
            ur = u[r]
            if ur:
                vs = v[s]
                if vs:
                    out[k] += c * ur * vs
        return out

    def scalar_vector(self, c: FieldElem, v: Sequence) -> list:
        """c * v for a central scalar c."""
        n = self.degree
        out = []
        for q in range(4):
            part = self.field.elem(*v[q * n:(q + 1) * n]) * c
            out.extend(part.coords)
        return out

    def conj_vector(self, v: Sequence) -> list:
        n = self.degree
        return list(v[:n]) + [-x for x in v[n:]]

    def element(self, v: Sequence) -> "QuatElem":
        n = self.degree
        return QuatElem(self, *(self.field.elem(*v[q * n:(q + 1) * n]) for q in range(4)))

    def norm_vector(self, v: Sequence) -> FieldElem:
        return self.element(v).reduced_norm()

    def trace_form(self, w: FieldElem) -> tuple[tuple[Fraction, ...], ...]:
        """Matrix of (u, v) -> Tr_{K/Q}(w * <u, v>) on the ambient frame, <x, x> = n(x)."""
        cache = self.__dict__.setdefault("_trace_forms", {})
        if w not in cache:
            n = self.degree
            rows = []
            for r in range(self.dim):
                qr, er = divmod(r, n)
                row = []
                for s in range(self.dim):
                    qs, es = divmod(s, n)
                    if qr != qs:
                        row.append(Fraction(0))
                        continue
                    value = w * self.norm_coefficients[qr] * self._basis_powers[er] * self._basis_powers[es]
                    row.append(value.trace())
                rows.append(tuple(row))
            cache[w] = tuple(rows)
        return cache[w]

    @cached_property
    def ramified_primes(self) -> tuple[FieldIdeal, ...]:
        """Finite primes of K ramified in the algebra, from a maximal order's discriminant."""
        from app.field_arith import factor_ideal
        from app.zlattice import maximal_order, reduced_discriminant

        factors = factor_ideal(reduced_discriminant(maximal_order(self)))
        primes = tuple(P for P, _ in factors)
        logger.info(f"Algebra ({self.a},{self.b}) over {self.field} ramifies at {[str(P) for P in primes]}")
        return primes

    @property
    def s(self) -> int:
        return len(self.ramified_primes)

    def __str__(self) -> str:
        return f"(-({self.a}),-({self.b}) / {self.field})"


@dataclass(frozen=True)
class QuatElem:
    algebra: QuatAlgebra
    t: FieldElem
    x: FieldElem
    y: FieldElem
    z: FieldElem

    @property
    def parts(self) -> tuple[FieldElem, ...]:
        return self.t, self.x, self.y, self.z

    def _coerce(self, other) -> "QuatElem":
        if isinstance(other, QuatElem):
            return other
        if isinstance(other, (int, Fraction, FieldElem)):
            return self.algebra.elem(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuatElem(self.algebra, *(p + q for p, q in zip(self.parts, other.parts)))

    __radd__ = __add__

    def __neg__(self):
        return QuatElem(self.algebra, *(-p for p in self.parts))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuatElem(self.algebra, *(p - q for p, q in zip(self.parts, other.parts)))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElem)):
            return QuatElem(self.algebra, *(p * other for p in self.parts))
        if not isinstance(other, QuatElem):
            return NotImplemented
        a, b = self.algebra.a, self.algebra.b
        t1, x1, y1, z1 = self.parts
        t2, x2, y2, z2 = other.parts
        return QuatElem(
            self.algebra,
            t1 * t2 - a * x1 * x2 - b * y1 * y2 - a * b * z1 * z2,
            t1 * x2 + x1 * t2 + b * (y1 * z2 - z1 * y2),
            t1 * y2 + y1 * t2 + a * (z1 * x2 - x1 * z2),
            t1 * z2 + z1 * t2 + x1 * y2 - y1 * x2,
        )

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, FieldElem)):
            return QuatElem(self.algebra, *(other * p for p in self.parts))
        return NotImplemented

    def conj(self) -> "QuatElem":
        return QuatElem(self.algebra, self.t, -self.x, -self.y, -self.z)

    def reduced_norm(self) -> FieldElem:
        return sum((c * p * p for c, p in zip(self.algebra.norm_coefficients, self.parts)), self.algebra.field.zero)

    def reduced_trace(self) -> FieldElem:
        return self.t * 2

    def inverse(self) -> "QuatElem":
        n = self.reduced_norm()
        if n.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self.conj() * n.inverse()

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, FieldElem)):
            return self * (self.algebra.field.one / other)
        return self * other.inverse()

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.parts)

    def vector(self) -> tuple[Fraction, ...]:
        return tuple(c for p in self.parts for c in p.coords)

    def __str__(self) -> str:
        names = ("", "i", "j", "ij")
        terms = [f"({p}){name}" if name else f"({p})" for p, name in zip(self.parts, names) if not p.is_zero()]
        return " + ".join(terms) or "0"

    __repr__ = __str__


# module-level operation names
def mul(alpha: QuatElem, beta: QuatElem) -> QuatElem:
    return alpha * beta


def conj(alpha: QuatElem) -> QuatElem:
    return alpha.conj()


def reduced_norm(alpha: QuatElem) -> FieldElem:
    return alpha.reduced_norm()


def reduced_trace(alpha: QuatElem) -> FieldElem:
    return alpha.reduced_trace()


def ramified_primes(Q: QuatAlgebra) -> tuple[FieldIdeal, ...]:
    return Q.ramified_primes


def make_algebra(K: BaseField, a, b) -> QuatAlgebra:
    """Build (-a,-b / K), rescaling a and b by squares to make them integral.

    Raises:
        ValueError: If a or b is not totally positive.
    """
    entries = []
    for name, value in (("a", a), ("b", b)):
        if isinstance(value, str):
            value = parse_elem(K, value)
        elif not isinstance(value, FieldElem):
            value = K.elem(value)
        if not value.is_totally_positive():
            raise ValueError(f"{name}={value} is not totally positive; the algebra would not be totally definite")
        den = lcm(*(c.denominator for c in value.coords))
        if den > 1:
            logger.info(f"Rescaling {name}={value} by {den}^2 to make it integral")
            value = value * (den * den)
        entries.append(value)
    return QuatAlgebra(K, entries[0], entries[1])
