"""Exact arithmetic in the base field K, which is Q or a real quadratic field.

Elements are coordinate vectors over the integral basis (1, w) where w = sqrt(d)
or (1 + sqrt(d))/2.  Fractional ideals are full Z-lattices in that frame kept in
integer Hermite normal form with a single denominator, so equality and hashing
are structural.  Unit, class group and zeta data are computed once per field and
memoized.
"""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from itertools import product
from math import isqrt, prod
from typing import Iterable, Sequence

from sympy import divisor_sigma, factorint, primerange
from sympy.ntheory import multiplicity, sqrt_mod

from app.config import get_settings
from app.errors import ConsistencyError, SearchCapExceeded
from app.linalg import (
    IntMatrix,
    fincke_pohst,
    integer_hnf,
    lattice_coordinates,
    rational_hnf,
    smith_invariants,
)
from app.models import FieldKind

logger = logging.getLogger(__name__)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Square root of a non-negative rational when it is rational."""
    x = Fraction(x)
    if x < 0:
        return None
    num, den = isqrt(x.numerator), isqrt(x.denominator)
    if num * num == x.numerator and den * den == x.denominator:
        return Fraction(num, den)
    return None


@dataclass(frozen=True)
class BaseField:
    """Q (kind=rationals, d=1) or Q(sqrt d) for squarefree d > 1."""

    kind: FieldKind
    d: int = 1

    @property
    def degree(self) -> int:
        return 1 if self.kind == FieldKind.RATIONALS else 2

    @cached_property
    def omega_relation(self) -> tuple[int, int]:
        # w^2 = p*w + q
        if self.degree == 1:
            return 0, 0
        if self.d % 4 == 1:
            return 1, (self.d - 1) // 4
        return 0, self.d

    @property
    def discriminant(self) -> int:
        if self.degree == 1:
            return 1
        return self.d if self.d % 4 == 1 else 4 * self.d

    def elem(self, *coords) -> "FieldElem":
        values = tuple(Fraction(c) for c in coords)
        values = values + (Fraction(0),) * (self.degree - len(values))
        if len(values) != self.degree:
            raise ValueError(f"expected {self.degree} coordinates, got {len(values)}")
        return FieldElem(self, values)

    @cached_property
    def one(self) -> "FieldElem":
        return self.elem(1)

    @cached_property
    def zero(self) -> "FieldElem":
        return self.elem(0)

    @cached_property
    def omega(self) -> "FieldElem":
        if self.degree == 1:
            raise ValueError("the rationals have no second basis element")
        return self.elem(0, 1)

    def from_sqrt_form(self, r, s) -> "FieldElem":
        """The element r + s*sqrt(d)."""
        r, s = Fraction(r), Fraction(s)
        if self.degree == 1:
            if s:
                raise ValueError("sqrt(d) is not an element of Q")
            return self.elem(r)
        if self.d % 4 == 1:
            return self.elem(r - s, 2 * s)
        return self.elem(r, s)

    def __str__(self) -> str:
        return "Q" if self.degree == 1 else f"Q(sqrt({self.d}))"


def make_field(kind: FieldKind | str, d: int | None = None) -> BaseField:
    """Build and validate a base field.

    Raises:
        ValueError: If d is missing, at most 1, or not squarefree.
    """
    kind = FieldKind(kind)
    if kind == FieldKind.RATIONALS:
        return BaseField(kind, 1)
    if d is None or d <= 1:
        raise ValueError(f"real quadratic fields need d > 1, got {d}")
    if any(e > 1 for e in factorint(d).values()):
        raise ValueError(f"d={d} is not squarefree")
    return BaseField(kind, int(d))


@dataclass(frozen=True, eq=False)
class FieldElem:
    field: BaseField
    coords: tuple[Fraction, ...]

    def _coerce(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.elem(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        other = self._coerce(other) if isinstance(other, (FieldElem, int, Fraction)) else NotImplemented
        if other is NotImplemented:
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self) -> int:
        if all(c == 0 for c in self.coords[1:]):
            return hash(self.coords[0])
        return hash(self.coords)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.field.degree == 1:
            return FieldElem(self.field, (self.coords[0] * other.coords[0],))
        a0, a1 = self.coords
        b0, b1 = other.coords
        p, q = self.field.omega_relation
        c = a1 * b1
        return FieldElem(self.field, (a0 * b0 + c * q, a0 * b1 + a1 * b0 + c * p))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.field.degree == 1:
            return FieldElem(self.field, (1 / self.coords[0],))
        conj = self.conj()
        return FieldElem(self.field, tuple(c / n for c in conj.coords))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def conj(self) -> "FieldElem":
        if self.field.degree == 1:
            return self
        c0, c1 = self.coords
        p, _ = self.field.omega_relation
        return FieldElem(self.field, (c0 + c1 * p, -c1))

    def norm(self) -> Fraction:
        if self.field.degree == 1:
            return self.coords[0]
        c0, c1 = self.coords
        p, q = self.field.omega_relation
        return c0 * c0 + p * c0 * c1 - q * c1 * c1

    def trace(self) -> Fraction:
        if self.field.degree == 1:
            return self.coords[0]
        c0, c1 = self.coords
        p, _ = self.field.omega_relation
        return 2 * c0 + p * c1

    def sqrt_form(self) -> tuple[Fraction, Fraction]:
        """(r, s) with self = r + s*sqrt(d)."""
        if self.field.degree == 1:
            return self.coords[0], Fraction(0)
        c0, c1 = self.coords
        if self.field.d % 4 == 1:
            return c0 + c1 / 2, c1 / 2
        return c0, c1

    def signs(self) -> tuple[int, ...]:
        """Exact signs under the real embeddings (sqrt d > 0 first)."""
        r, s = self.sqrt_form()
        if self.field.degree == 1:
            return (_sign(r),)
        return tuple(self._embedded_sign(r, t) for t in (s, -s))

    def _embedded_sign(self, r: Fraction, t: Fraction) -> int:
        if t == 0 or r == 0:
            return _sign(r) or _sign(t)
        if (r > 0) == (t > 0):
            return _sign(r)
        # opposite signs: compare r^2 with t^2 d
        return _sign(r) if r * r > t * t * self.field.d else _sign(t)

    def embeddings(self) -> tuple[float, ...]:
        r, s = self.sqrt_form()
        if self.field.degree == 1:
            return (float(r),)
        root = self.field.d ** 0.5
        return float(r) + float(s) * root, float(r) - float(s) * root

    def is_totally_positive(self) -> bool:
        return all(sg > 0 for sg in self.signs())

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def __str__(self) -> str:
        return render_elem(self)

    __repr__ = __str__


def is_square(x: FieldElem) -> FieldElem | None:
    """A square root of x in K, or None."""
    K = x.field
    if x.is_zero():
        return K.zero
    r, s = x.sqrt_form()
    if K.degree == 1:
        root = rational_sqrt(r)
        return None if root is None else K.elem(root)
    m = rational_sqrt(x.norm())
    if m is None:
        return None
    for candidate in ((r + m) / 2, (r - m) / 2):
        p = rational_sqrt(candidate)
        if p is None:
            continue
        if p == 0:
            q = rational_sqrt(r / K.d)
            if q is None:
                continue
        else:
            q = s / (2 * p)
        y = K.from_sqrt_form(p, q)
        if y * y == x:
            return y
    return None


# -- parsing -----------------------------------------------------------------

_TERM = re.compile(r"([+-]?)(\d+(?:/\d+)?)?(\*?w)?")


def parse_elem(K: BaseField, text: str) -> FieldElem:
    """Parse "p+q*w" syntax (w the second integral basis element).

    Raises:
        ValueError: On malformed input or w over the rationals.
    """
    compact = re.sub(r"\s+", "", str(text))
    if not compact:
        raise ValueError("empty field element")
    chunks = [c for c in re.split(r"(?=[+-])", compact) if c]
    c0, c1 = Fraction(0), Fraction(0)
    for chunk in chunks:
        match = _TERM.fullmatch(chunk)
        if not match or not (match.group(2) or match.group(3)):
            raise ValueError(f"cannot parse field element {text!r}")
        sign = -1 if match.group(1) == "-" else 1
        coefficient = Fraction(match.group(2)) if match.group(2) else Fraction(1)
        if match.group(3):
            if not match.group(2) and match.group(3).startswith("*"):
                raise ValueError(f"cannot parse field element {text!r}")
            if K.degree == 1:
                raise ValueError("w is not defined over the rationals")
            c1 += sign * coefficient
        else:
            c0 += sign * coefficient
    return K.elem(c0, c1) if K.degree == 2 else K.elem(c0)


def render_elem(x: FieldElem) -> str:
    c0 = x.coords[0]
    c1 = x.coords[1] if len(x.coords) > 1 else Fraction(0)
    parts = []
    if c0 != 0 or c1 == 0:
        parts.append(str(c0))
    if c1 != 0:
        if c1 == 1:
            term = "w"
        elif c1 == -1:
            term = "-w"
        else:
            term = f"{c1}*w"
        if parts and not term.startswith("-"):
            term = "+" + term
        parts.append(term)
    return "".join(parts)


# -- ideals ------------------------------------------------------------------

@dataclass(frozen=True)
class FieldIdeal:
    """Fractional Z_K-ideal: rows of ``basis`` divided by ``denominator``."""

    field: BaseField
    basis: IntMatrix
    denominator: int

    @cached_property
    def elements(self) -> tuple[FieldElem, ...]:
        return tuple(
            self.field.elem(*(Fraction(c, self.denominator) for c in row)) for row in self.basis
        )

    @cached_property
    def norm(self) -> Fraction:
        return Fraction(prod(self.basis[k][k] for k in range(len(self.basis))), self.denominator ** self.field.degree)

    @property
    def key(self) -> tuple:
        return (self.norm, self.denominator, self.basis)

    def is_integral(self) -> bool:
        return self.denominator == 1

    def is_one(self) -> bool:
        return self.denominator == 1 and self.norm == 1

    def contains(self, x: FieldElem) -> bool:
        return lattice_coordinates(self.basis, self.denominator, x.coords) is not None

    def issubset(self, other: "FieldIdeal") -> bool:
        return all(other.contains(e) for e in self.elements)

    def __mul__(self, other: "FieldIdeal | FieldElem | int | Fraction") -> "FieldIdeal":
        if isinstance(other, FieldIdeal):
            return make_ideal(self.field, [a * b for a in self.elements for b in other.elements])
        return make_ideal(self.field, [e * other for e in self.elements])

    __rmul__ = __mul__

    def __add__(self, other: "FieldIdeal") -> "FieldIdeal":
        return make_ideal(self.field, list(self.elements) + list(other.elements))

    def inverse(self) -> "FieldIdeal":
        if self.field.degree == 1:
            return make_ideal(self.field, [self.elements[0].inverse()])
        n = self.norm
        return make_ideal(self.field, [e.conj() / n for e in self.elements])

    def __truediv__(self, other: "FieldIdeal") -> "FieldIdeal":
        return self * other.inverse()

    def __pow__(self, k: int) -> "FieldIdeal":
        if k < 0:
            return self.inverse() ** (-k)
        result = unit_ideal(self.field)
        for _ in range(k):
            result = result * self
        return result

    def conj(self) -> "FieldIdeal":
        return make_ideal(self.field, [e.conj() for e in self.elements])

    def is_prime(self) -> bool:
        factors = factor_ideal(self)
        return len(factors) == 1 and factors[0][1] == 1

    def __str__(self) -> str:
        return render_ideal(self)


def make_ideal(K: BaseField, generators: Iterable[FieldElem | int | Fraction]) -> FieldIdeal:
    """Z_K-ideal generated by ``generators``.

    Raises:
        ValueError: If every generator is zero.
    """
    vectors = []
    for g in generators:
        g = g if isinstance(g, FieldElem) else K.elem(g)
        if g.is_zero():
            continue
        vectors.append(g.coords)
        if K.degree == 2:
            vectors.append((g * K.omega).coords)
    if not vectors:
        raise ValueError("the zero module is not a fractional ideal")
    basis, den = rational_hnf(vectors, K.degree)
    return FieldIdeal(K, basis, den)


def principal_ideal(x: FieldElem) -> FieldIdeal:
    return make_ideal(x.field, [x])


@lru_cache(maxsize=None)
def unit_ideal(K: BaseField) -> FieldIdeal:
    return make_ideal(K, [K.one])


@lru_cache(maxsize=None)
def primes_above(K: BaseField, p: int) -> tuple[FieldIdeal, ...]:
    """Prime ideals over the rational prime p, by Kummer-Dedekind on w."""
    if K.degree == 1:
        return (make_ideal(K, [p]),)
    pw, qw = K.omega_relation
    if p == 2:
        roots = [r for r in range(2) if (r * r - pw * r - qw) % 2 == 0]
    else:
        half = pow(2, -1, p)
        square_roots = sqrt_mod(K.d % p if K.d % 4 == 1 else (4 * K.d) % p, p, all_roots=True) or []
        roots = sorted({((pw + s) * half) % p for s in square_roots})
    if not roots:
        return (make_ideal(K, [p]),)
    primes = [make_ideal(K, [K.elem(p), K.omega - r]) for r in roots]
    return tuple(sorted(set(primes), key=lambda P: P.key))


def rational_prime_under(P: FieldIdeal) -> int:
    return P.basis[0][0]


def ramification_index(P: FieldIdeal) -> int:
    p = rational_prime_under(P)
    if P.field.degree == 2 and len(primes_above(P.field, p)) == 1 and P.norm == p:
        return 2
    return 1


def valuation(a: FieldIdeal, P: FieldIdeal) -> int:
    p = rational_prime_under(P)
    integral = FieldIdeal(a.field, a.basis, 1)
    v = 0
    power = P
    while integral.issubset(power):
        v += 1
        power = power * P
    if a.denominator > 1:
        v -= ramification_index(P) * multiplicity(p, a.denominator)
    return v


def factor_ideal(a: FieldIdeal) -> list[tuple[FieldIdeal, int]]:
    """Unique factorization into prime ideals, sorted by (norm, HNF)."""
    top = int(prod(a.basis[k][k] for k in range(len(a.basis))))
    rational_primes = set(factorint(top)) | set(factorint(a.denominator))
    factors = []
    for p in sorted(rational_primes):
        for P in primes_above(a.field, p):
            v = valuation(a, P)
            if v:
                factors.append((P, v))
    return factors


def ideal_from_factors(K: BaseField, factors: Sequence[tuple[FieldIdeal, int]]) -> FieldIdeal:
    return reduce(lambda acc, pe: acc * pe[0] ** pe[1], factors, unit_ideal(K))


# -- units, principality, class groups ---------------------------------------

@lru_cache(maxsize=None)
def _fundamental_unit(K: BaseField) -> FieldElem:
    pw, qw = K.omega_relation
    P, Q = (1, 2) if K.d % 4 == 1 else (0, 1)
    D, s = K.d, isqrt(K.d)
    a = (P + s) // Q
    h_prev, h = 1, a
    k_prev, k = 0, 1
    while h * h - pw * h * k - qw * k * k not in (1, -1):
        P = a * Q - P
        Q = (D - P * P) // Q
        a = (P + s) // Q
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
    # h - k*w is the small unit; its conjugate is > 1
    eps = K.elem(h - k * pw, k)
    if (eps - 1).signs()[0] <= 0:
        raise ConsistencyError(f"fundamental unit {eps} is not > 1")
    logger.debug(f"Fundamental unit of {K}: {eps}")
    return eps


def fundamental_unit(K: BaseField) -> FieldElem:
    """The fundamental unit eps > 1 of a real quadratic field.

    Raises:
        ValueError: For the rationals.
    """
    if K.degree == 1:
        raise ValueError("the rationals have no fundamental unit")
    return _fundamental_unit(K)


def is_principal(a: FieldIdeal) -> FieldElem | None:
    """A generator of ``a`` or None when ``a`` is not principal."""
    K = a.field
    if K.degree == 1:
        return K.elem(Fraction(a.basis[0][0], a.denominator))
    eps = fundamental_unit(K)
    norm = a.basis[0][0] * a.basis[1][1]
    rows = [K.elem(*row) for row in a.basis]
    gram = [[(x * y).trace() for y in rows] for x in rows]
    bound = norm * (eps * eps).trace()
    for coords, _ in fincke_pohst(gram, bound):
        alpha = coords[0] * rows[0] + coords[1] * rows[1]
        if abs(alpha.norm()) == norm:
            return alpha / a.denominator
    return None


def totally_positive_generator(a: FieldIdeal) -> FieldElem | None:
    g = is_principal(a)
    if g is None:
        return None
    multipliers = [1, -1]
    if a.field.degree == 2:
        eps = fundamental_unit(a.field)
        multipliers += [eps, -eps]
    for c in multipliers:
        candidate = g * c
        if candidate.is_totally_positive():
            return candidate
    return None


@dataclass(frozen=True)
class ClassGroupData:
    field: BaseField
    h: int
    class_reps: tuple[FieldIdeal, ...]
    invariants: tuple[int, ...]
    h_plus: int
    narrow_reps: tuple[FieldIdeal, ...]
    u: int
    totally_positive_unit_reps: tuple[FieldElem, ...]

    def class_index(self, a: FieldIdeal) -> int:
        for index, rep in enumerate(self.class_reps):
            if is_principal(a / rep) is not None:
                return index
        raise ConsistencyError(f"ideal {a} matches no class representative")

    def narrow_class_index(self, a: FieldIdeal) -> int:
        for index, rep in enumerate(self.narrow_reps):
            if totally_positive_generator(a / rep) is not None:
                return index
        raise ConsistencyError(f"ideal {a} matches no narrow class representative")

    def unit_label(self, t: FieldElem) -> int:
        """Index of the totally positive unit representative congruent to t mod squares."""
        for index, rep in enumerate(self.totally_positive_unit_reps):
            if is_square(t / rep) is not None:
                return index
        raise ConsistencyError(f"{t} is not a totally positive unit")


def _class_order(P: FieldIdeal, cap: int) -> int:
    power = P
    for k in range(1, cap + 1):
        if is_principal(power) is not None:
            return k
        power = power * P
    raise SearchCapExceeded(f"class of {P} has order above {cap}")


def _real_quadratic_class_group(K: BaseField) -> tuple[list[FieldIdeal], list[list[int]]]:
    cap = get_settings().CLASS_ORDER_CAP
    bound = isqrt(K.discriminant) // 2
    base: list[FieldIdeal] = []
    relations: list[list[int]] = []
    for p in primerange(2, bound + 1):
        above = primes_above(K, p)
        start = len(base)
        base.extend(above)
        relations.append((start, [valuation(make_ideal(K, [p]), P) for P in above]))
    m = len(base)
    relation_rows = []
    for start, exps in relations:
        row = [0] * m
        row[start:start + len(exps)] = exps
        relation_rows.append(row)
    for index, P in enumerate(base):
        row = [0] * m
        row[index] = _class_order(P, cap)
        relation_rows.append(row)
    if m == 0:
        return base, relation_rows
    while True:
        lattice = integer_hnf(relation_rows, m)
        found = False
        for exps in product(*(range(lattice[k][k]) for k in range(m))):
            if not any(exps):
                continue
            if is_principal(ideal_from_factors(K, list(zip(base, exps)))) is not None:
                relation_rows.append(list(exps))
                found = True
                break
        if not found:
            return base, relation_rows


@lru_cache(maxsize=None)
def class_groups(K: BaseField) -> ClassGroupData:
    """Class group, narrow class group and totally positive units modulo squares."""
    if K.degree == 1:
        Z = unit_ideal(K)
        return ClassGroupData(K, 1, (Z,), (), 1, (Z,), 0, (K.one,))

    base, relations = _real_quadratic_class_group(K)
    m = len(base)
    if m:
        lattice = integer_hnf(relations, m)
        exponent_vectors = list(product(*(range(lattice[k][k]) for k in range(m))))
        invariants = tuple(smith_invariants(relations, m))
    else:
        exponent_vectors = [()]
        invariants = ()
    class_reps = tuple(ideal_from_factors(K, list(zip(base, exps))) for exps in exponent_vectors)

    eps = fundamental_unit(K)
    if eps.norm() == 1:
        u = 1
        unit_reps = (K.one, eps)
        signs = (K.one, K.omega)  # N(w) < 0 for every d > 1
    else:
        u = 0
        unit_reps = (K.one,)
        signs = (K.one,)
    narrow_reps = tuple(rep * s for rep in class_reps for s in signs)
    data = ClassGroupData(
        field=K,
        h=len(class_reps),
        class_reps=class_reps,
        invariants=invariants,
        h_plus=len(narrow_reps),
        narrow_reps=narrow_reps,
        u=u,
        totally_positive_unit_reps=unit_reps,
    )
    logger.info(f"Class groups of {K}: h={data.h} h+={data.h_plus} u={data.u} structure={list(invariants)}")
    return data


def narrow_class_index(a: FieldIdeal) -> int:
    return class_groups(a.field).narrow_class_index(a)


def class_index(a: FieldIdeal) -> int:
    return class_groups(a.field).class_index(a)


def zeta_minus_one(K: BaseField) -> Fraction:
    """The value of the Dedekind zeta function of K at -1."""
    if K.degree == 1:
        return Fraction(-1, 12)
    D = K.discriminant
    total = 0
    b = D % 2
    while b * b < D:
        term = int(divisor_sigma((D - b * b) // 4, 1))
        total += term if b == 0 else 2 * term
        b += 2
    return Fraction(total, 60)


# -- ideal syntax ------------------------------------------------------------

_FACTOR = re.compile(r"(\d+)(?:\.(\d+))?(?:\^(-?\d+))?")


def parse_ideal(K: BaseField, text: str) -> FieldIdeal:
    """Parse "unit", "prime:p^e*q.k^f" (k-th prime above q, from 1) or "class:k".

    Raises:
        ValueError: On malformed input or a non-prime / out-of-range index.
    """
    spec = re.sub(r"\s+", "", str(text))
    if spec == "unit":
        return unit_ideal(K)
    if spec.startswith("class:"):
        reps = class_groups(K).narrow_reps
        index = int(spec.split(":", 1)[1])
        if not 0 <= index < len(reps):
            raise ValueError(f"narrow class index {index} out of range 0..{len(reps) - 1}")
        return reps[index]
    if spec.startswith("prime:"):
        result = unit_ideal(K)
        for item in spec.split(":", 1)[1].split("*"):
            match = _FACTOR.fullmatch(item)
            if not match:
                raise ValueError(f"cannot parse ideal factor {item!r}")
            p = int(match.group(1))
            if factorint(p) != {p: 1}:
                raise ValueError(f"{p} is not a prime number")
            above = primes_above(K, p)
            k = int(match.group(2) or 1)
            if not 1 <= k <= len(above):
                raise ValueError(f"there are {len(above)} primes above {p}, index {k} requested")
            result = result * above[k - 1] ** int(match.group(3) or 1)
        return result
    raise ValueError(f"cannot parse ideal {text!r}")


def render_ideal(a: FieldIdeal) -> str:
    factors = factor_ideal(a)
    if not factors:
        return "unit"
    items = []
    for P, v in factors:
        p = rational_prime_under(P)
        above = primes_above(a.field, p)
        item = str(p) if len(above) == 1 else f"{p}.{above.index(P) + 1}"
        items.append(item if v == 1 else f"{item}^{v}")
    return "prime:" + "*".join(items)
