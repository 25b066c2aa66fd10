"""Z_K-lattices in a quaternion algebra, kept as canonical rank-4n Z-lattices.

A lattice is an integer HNF basis over the ambient frame of the algebra plus one
denominator.  Orders and normal ideals are roles of the same type; their left and
right orders and norms are cached on the instance.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from math import prod
from typing import Iterable, Sequence

from app.errors import ConsistencyError
from app.field_arith import (
    FieldElem,
    FieldIdeal,
    class_groups,
    factor_ideal,
    make_ideal,
    unit_ideal,
)
from app.linalg import (
    IntMatrix,
    Vector,
    dual_basis,
    lattice_coordinates,
    quotient_representatives,
    rational_hnf,
    rational_inverse,
)
from app.quat_algebra import QuatAlgebra, QuatElem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuatLattice:
    """Full-rank Z_K-lattice in Q: an HNF basis over the ambient Z-frame, divided by denominator.

    The Z_K-module property is checked where a lattice enters from arbitrary vectors
    (lattice_from_vectors, lattice_from_generators). Sums, products and scalings of
    Z_K-modules skip the check.
    """

    algebra: QuatAlgebra
    basis: IntMatrix
    denominator: int

    @cached_property
    def vectors(self) -> tuple[Vector, ...]:
        d = self.denominator
        return tuple(tuple(Fraction(c, d) for c in row) for row in self.basis)

    @property
    def key(self) -> tuple:
        return (self.denominator, self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def elements(self) -> list[QuatElem]:
        return [self.algebra.element(v) for v in self.vectors]

    def vector_at(self, coords: Sequence[int]) -> list[Fraction]:
        out = [Fraction(0)] * self.dim
        for c, row in zip(coords, self.basis):
            if c:
                for k in range(self.dim):
                    out[k] += c * row[k]
        return [x / self.denominator for x in out]

    def element_at(self, coords: Sequence[int]) -> QuatElem:
        return self.algebra.element(self.vector_at(coords))

    def contains_vector(self, v: Sequence) -> bool:
        return lattice_coordinates(self.basis, self.denominator, v) is not None

    def contains(self, alpha: QuatElem) -> bool:
        return self.contains_vector(alpha.vector())

    def issubset(self, other: "QuatLattice") -> bool:
        return all(other.contains_vector(v) for v in self.vectors)

    @property
    def volume(self) -> Fraction:
        """Covolume relative to the ambient frame."""
        return Fraction(prod(self.basis[k][k] for k in range(self.dim)), self.denominator ** self.dim)

    def __mul__(self, other: "QuatLattice") -> "QuatLattice":
        return lattice_mul(self, other)

    def __add__(self, other: "QuatLattice") -> "QuatLattice":
        return lattice_from_vectors(self.algebra, self.vectors + other.vectors, check=False)

    def left_scale(self, alpha: QuatElem) -> "QuatLattice":
        a = alpha.vector()
        return lattice_from_vectors(self.algebra, [self.algebra.mul_vectors(a, v) for v in self.vectors], check=False)

    def right_scale(self, alpha: QuatElem) -> "QuatLattice":
        a = alpha.vector()
        return lattice_from_vectors(self.algebra, [self.algebra.mul_vectors(v, a) for v in self.vectors], check=False)

    def ideal_scale(self, ideal: FieldIdeal | FieldElem) -> "QuatLattice":
        scalars = ideal.elements if isinstance(ideal, FieldIdeal) else (ideal,)
        Q = self.algebra
        return lattice_from_vectors(Q, [Q.scalar_vector(c, v) for c in scalars for v in self.vectors], check=False)

    @cached_property
    def right_order(self) -> "QuatLattice":
        return _multiplier_order(self, right=True)

    @cached_property
    def left_order(self) -> "QuatLattice":
        return _multiplier_order(self, right=False)

    @cached_property
    def norm(self) -> FieldIdeal:
        Q = self.algebra
        vs = self.vectors
        generators = [Q.norm_vector(v) for v in vs]
        for i, j in combinations(range(len(vs)), 2):
            generators.append(Q.norm_vector([x + y for x, y in zip(vs[i], vs[j])]))
        return make_ideal(Q.field, generators)

    def __str__(self) -> str:
        return f"QuatLattice(den={self.denominator}, basis={[list(r) for r in self.basis]})"


def lattice_from_vectors(Q: QuatAlgebra, vectors: Iterable[Sequence], check: bool = True) -> QuatLattice:
    """Canonical lattice spanned by ambient vectors.

    Raises:
        ValueError: If the span is not of full rank, or (with ``check``) not a Z_K-module.
    """
    basis, den = rational_hnf([tuple(Fraction(x) for x in v) for v in vectors], Q.dim)
    lattice = QuatLattice(Q, basis, den)
    if check and Q.degree == 2:
        omega = Q.field.omega
        for v in lattice.vectors:
            if not lattice.contains_vector(Q.scalar_vector(omega, v)):
                raise ValueError("generators do not span a Z_K-module")
    return lattice


def lattice_from_generators(Q: QuatAlgebra, gens: Sequence[QuatElem]) -> QuatLattice:
    """Z_K-span of quaternions."""
    vectors = []
    for g in gens:
        v = g.vector()
        vectors.append(v)
        if Q.degree == 2:
            vectors.append(Q.scalar_vector(Q.field.omega, v))
    return lattice_from_vectors(Q, vectors)


def standard_order(Q: QuatAlgebra) -> QuatLattice:
    """Z_K<1, i, j, ij>, the ambient frame itself."""
    identity = tuple(tuple(int(i == j) for j in range(Q.dim)) for i in range(Q.dim))
    return QuatLattice(Q, identity, 1)


def lattice_mul(A: QuatLattice, B: QuatLattice) -> QuatLattice:
    Q = A.algebra
    den = A.denominator * B.denominator
    products = []
    for b in B.basis:
        for a in A.basis:
            products.append([Fraction(c, den) for c in Q.mul_vectors(a, b)])
    return lattice_from_vectors(Q, products, check=False)


def _multiplier_order(J: QuatLattice, right: bool) -> QuatLattice:
    # O = {a : b*a (resp. a*b) has integral J-coordinates for every basis vector b},
    # the dual of the span of the coordinate columns.
    Q = J.algebra
    dim = Q.dim
    inverse = rational_inverse(J.basis)
    columns = []
    for b in J.basis:
        rows = []
        for k in range(dim):
            e = [int(i == k) for i in range(dim)]
            product = Q.mul_vectors(b, e) if right else Q.mul_vectors(e, b)
            rows.append([sum((product[m] * inverse[m][l] for m in range(dim) if product[m]), Fraction(0)) for l in range(dim)])
        columns.extend(tuple(rows[k][l] for k in range(dim)) for l in range(dim))
    span, den = rational_hnf(columns, dim)
    dual = dual_basis([[Fraction(c, den) for c in row] for row in span])
    return lattice_from_vectors(Q, dual, check=False)


def left_order(J: QuatLattice) -> QuatLattice:
    return J.left_order


def right_order(J: QuatLattice) -> QuatLattice:
    return J.right_order


def lattice_norm(J: QuatLattice) -> FieldIdeal:
    return J.norm


def conj_lattice(J: QuatLattice) -> QuatLattice:
    Q = J.algebra
    return lattice_from_vectors(Q, [Q.conj_vector(v) for v in J.vectors], check=False)


def ideal_inverse(J: QuatLattice) -> QuatLattice:
    """J^{-1} = conj(J) n(J)^{-1}.

    Raises:
        ValueError: If J is not normal.
    """
    if not is_maximal(J.right_order):
        raise ValueError("ideal inverse requires a normal lattice")
    return conj_lattice(J).ideal_scale(J.norm.inverse())


def _field_determinant(rows: list[list[FieldElem]]) -> FieldElem:
    m = [list(r) for r in rows]
    n = len(m)
    K = m[0][0].field
    det = K.one
    for c in range(n):
        pivot = next((r for r in range(c, n) if not m[r][c].is_zero()), None)
        if pivot is None:
            return K.zero
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det = det * m[c][c]
        inv = m[c][c].inverse()
        for r in range(c + 1, n):
            f = m[r][c] * inv
            if not f.is_zero():
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def reduced_discriminant(O: QuatLattice) -> FieldIdeal:
    """discrd(O): the K-minors of the Z-basis generate d(O), and discrd = d(O) * 4ab."""
    Q = O.algebra
    K = Q.field
    components = [list(Q.element(v).parts) for v in O.vectors]
    minors = []
    for subset in combinations(components, 4):
        det = _field_determinant(list(subset))
        if not det.is_zero():
            minors.append(det)
    return make_ideal(K, minors) * make_ideal(K, [Q.a * Q.b * 4])


@lru_cache(maxsize=None)
def is_maximal(O: QuatLattice) -> bool:
    return reduced_discriminant(O) == _ramified_product(O.algebra)


def _ramified_product(Q: QuatAlgebra) -> FieldIdeal:
    result = unit_ideal(Q.field)
    for P in Q.ramified_primes:
        result = result * P
    return result


def _trace_pairing_integral(R: QuatLattice, O: QuatLattice) -> bool:
    # Tr_{K/Q} trd(r * conj(o)) in Z for all basis vectors r of R and o of O
    T = R.algebra.trace_form(R.algebra.field.one)
    den = R.denominator * O.denominator
    for r in R.basis:
        rT = [sum(r[a] * T[a][b] for a in range(len(r)) if r[a]) for b in range(len(r))]
        for o in O.basis:
            value = 2 * sum(x * y for x, y in zip(rT, o))
            if (value / den).denominator != 1:
                return False
    return True


def _ring_closure(O: QuatLattice, x: Sequence) -> QuatLattice | None:
    Q = O.algebra
    generators = list(O.vectors) + [x]
    if Q.degree == 2:
        generators.append(Q.scalar_vector(Q.field.omega, x))
    R = lattice_from_vectors(Q, generators, check=False)
    while True:
        if not _trace_pairing_integral(R, O):
            return None
        square = R * R
        if square == R:
            return R
        R = square


def _enlarge_at(O: QuatLattice, P: FieldIdeal) -> QuatLattice | None:
    bigger = O.ideal_scale(P.inverse())
    for coords in quotient_representatives(bigger.basis, bigger.denominator, O.vectors):
        if not any(coords):
            continue
        x = bigger.vector_at(coords)
        alpha = O.algebra.element(x)
        if not (alpha.reduced_trace().is_integral() and alpha.reduced_norm().is_integral()):
            continue
        R = _ring_closure(O, x)
        if R is not None:
            logger.debug(f"Enlarged order at {P}: index {O.volume / R.volume}")
            return R
    return None


@lru_cache(maxsize=None)
def maximal_order(Q: QuatAlgebra) -> QuatLattice:
    """A maximal order containing the standard order, by prime-wise enlargement."""
    O = standard_order(Q)
    while True:
        enlarged = False
        for P, e in factor_ideal(reduced_discriminant(O)):
            R = _enlarge_at(O, P)
            if R is not None:
                O = R
                enlarged = True
                break
            if e > 1:
                raise ConsistencyError(f"no enlargement at {P} although it divides discrd to power {e}")
        if not enlarged:
            logger.info(f"Maximal order of {Q}: discrd norm {reduced_discriminant(O).norm}")
            return O


def two_sided_maximal_ideal(M: QuatLattice, P: FieldIdeal) -> QuatLattice:
    """The unique maximal two-sided M-ideal over the prime P.

    Raises:
        ValueError: If P is not a prime ideal.
    """
    if not P.is_prime():
        raise ValueError(f"{P} is not a prime ideal")
    pM = M.ideal_scale(P)
    if P not in M.algebra.ramified_primes:
        return pM
    Q = M.algebra
    singular = []
    for coords in quotient_representatives(M.basis, M.denominator, pM.vectors):
        if not any(coords):
            continue
        x = M.vector_at(coords)
        if P.contains(Q.norm_vector(x)):
            singular.append(x)
    ideal = lattice_from_vectors(Q, list(pM.vectors) + singular, check=False)
    if ideal * ideal != pM or ideal.norm != P:
        raise ConsistencyError(f"two-sided ideal over ramified {P} fails P^2 = pM")
    return ideal


def right_neighbors(I: QuatLattice, P: FieldIdeal) -> list[QuatLattice]:
    """The q+1 right ideals N, P*I < N < I, with n(N) = n(I)*P, at an unramified prime P.

    Raises:
        ValueError: If P ramifies in the algebra.
    """
    Q = I.algebra
    if P in Q.ramified_primes:
        raise ValueError(f"{P} is ramified; use the two-sided ideal instead")
    O = I.right_order
    pI = I.ideal_scale(P)
    target = I.norm * P
    found: list[QuatLattice] = []
    for coords in quotient_representatives(I.basis, I.denominator, pI.vectors):
        if not any(coords):
            continue
        x = I.vector_at(coords)
        if not target.contains(Q.norm_vector(x)):
            continue
        if any(N.contains_vector(x) for N in found):
            continue
        generators = list(pI.vectors) + [Q.mul_vectors(x, m) for m in O.vectors]
        found.append(lattice_from_vectors(Q, generators, check=False))
    expected = int(P.norm) + 1
    if len(found) != expected:
        raise ConsistencyError(f"found {len(found)} neighbours at {P}, expected {expected}")
    return sorted(found, key=lambda N: N.key)


def two_sided_ideal_reps(M: QuatLattice) -> list[QuatLattice]:
    """The 2^s * h_K two-sided ideals b * prod(P) representing two-sided classes modulo K^*."""
    Q = M.algebra
    ramified = [two_sided_maximal_ideal(M, P) for P in Q.ramified_primes]
    reps = []
    for b in class_groups(Q.field).class_reps:
        base = M.ideal_scale(b)
        for mask in range(2 ** len(ramified)):
            T = base
            for bit, P in enumerate(ramified):
                if mask >> bit & 1:
                    T = T * P
            reps.append(T)
    return reps
