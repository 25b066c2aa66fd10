"""Right ideal classes, conjugacy types of maximal orders and two-sided data.

Class enumeration walks neighbours at small primes and stops once the
collected classes carry the full Eichler mass.  Every equivalence question
(ideal classes, conjugacy of orders, two-sided classes) is reduced to
``is_left_principal`` on a suitable product of ideals.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import log2
from typing import Callable, Iterator, Sequence

from sympy import primerange

from app.config import get_settings
from app.errors import ConsistencyError
from app.field_arith import (
    BaseField,
    FieldElem,
    FieldIdeal,
    class_groups,
    factor_ideal,
    ideal_from_factors,
    is_principal,
    narrow_class_index,
    primes_above,
    principal_ideal,
    zeta_minus_one,
)
from app.enumeration import is_left_principal, short_vectors, trace_gram, unit_data
from app.quat_algebra import QuatAlgebra, QuatElem
from app.zlattice import (
    QuatLattice,
    ideal_inverse,
    right_neighbors,
    two_sided_ideal_reps,
    two_sided_maximal_ideal,
)

logger = logging.getLogger(__name__)


@dataclass
class ClassData:
    algebra: QuatAlgebra
    M: QuatLattice
    right_ideal_reps: list[QuatLattice]
    # [O_l(I_k)^* : Z_K^*] per representative
    left_unit_indices: list[int]
    type_reps: list[QuatLattice] = field(default_factory=list)
    type_index: list[int] = field(default_factory=list)

    @property
    def h(self) -> int:
        return len(self.right_ideal_reps)

    @property
    def t(self) -> int:
        return len(self.type_reps)


@dataclass
class NormalizerData:
    """Generators of N(M) modulo K^* M^* and their norm classes."""

    order: QuatLattice
    coset_reps: list[QuatElem]
    Pi: list[FieldElem]
    f_i: int


# -- square classes of principal ideals ---------------------------------------

def principal_square_root(x: FieldElem) -> FieldElem | None:
    """c with (x) = (c)^2, or None when (x) is not the square of a principal ideal."""
    factors = factor_ideal(principal_ideal(x))
    if any(v % 2 for _, v in factors):
        return None
    return is_principal(ideal_from_factors(x.field, [(P, v // 2) for P, v in factors]))


def same_norm_class(x: FieldElem, y: FieldElem) -> bool:
    return principal_square_root(x / y) is not None


# -- masses -------------------------------------------------------------------

def eichler_mass(Q: QuatAlgebra) -> Fraction:
    """2^(1-[K:Q]) |zeta_K(-1)| h_K prod(N(p) - 1) over the finite ramified primes."""
    K = Q.field
    mass = Fraction(2) ** (1 - K.degree) * abs(zeta_minus_one(K)) * class_groups(K).h
    for P in Q.ramified_primes:
        mass *= P.norm - 1
    return mass


def narrow_class_mass(data: ClassData, a: FieldIdeal) -> Fraction:
    """Sum of 1/[O_l(I)^*:Z_K^*] over the classes with [n(I)] = [a]."""
    target = narrow_class_index(a)
    return sum(
        (Fraction(1, index) for I, index in zip(data.right_ideal_reps, data.left_unit_indices)
         if narrow_class_index(I.norm) == target),
        Fraction(0),
    )


def mass_per_narrow_class(Q: QuatAlgebra, a: FieldIdeal, data: ClassData | None = None) -> Fraction:
    """Eichler mass divided by h_K^+, checked against the direct sum when ``data`` is given.

    Raises:
        ConsistencyError: If the direct sum disagrees.
    """
    value = eichler_mass(Q) / class_groups(Q.field).h_plus
    if data is not None:
        direct = narrow_class_mass(data, a)
        if direct != value:
            raise ConsistencyError(f"narrow class mass {direct} != Mass(M)/h+ = {value}")
    return value


# -- right ideal classes ------------------------------------------------------

@lru_cache(maxsize=None)
def order_fingerprint(O: QuatLattice) -> tuple:
    """Conjugation-invariant key: unit index and theta counts of Tr(n) up to THETA_BOUND."""
    bound = get_settings().THETA_BOUND
    G = trace_gram(O, O.algebra.field.one)
    theta = Counter(value for _, value in short_vectors(G, bound))
    return unit_data(O).unit_index, tuple(sorted(theta.items()))


def _class_key(I: QuatLattice) -> tuple:
    return narrow_class_index(I.norm), order_fingerprint(I.left_order)


def primes_by_norm(K: BaseField) -> Iterator[FieldIdeal]:
    """All prime ideals of K in order of increasing norm."""
    low, high = 1, 16
    while True:
        batch = [P for p in primerange(2, high + 1) for P in primes_above(K, p) if low < P.norm <= high]
        yield from sorted(batch, key=lambda P: P.key)
        low, high = high, 2 * high


def right_ideal_classes(M: QuatLattice) -> ClassData:
    """Representatives of the right M-ideal classes, M first.

    Raises:
        ConsistencyError: If the collected mass overshoots the Eichler mass.
    """
    Q = M.algebra
    target = eichler_mass(Q)
    reps = [M]
    indices = [unit_data(M).unit_index]
    keys = [_class_key(M)]
    mass = Fraction(1, indices[0])
    primes = primes_by_norm(Q.field)

    def is_new(N: QuatLattice, key: tuple) -> bool:
        for rep, rep_key in zip(reps, keys):
            if rep_key == key and is_left_principal(N * ideal_inverse(rep)) is not None:
                return False
        return True

    while mass < target:
        P = next(primes)
        ramified = P in Q.ramified_primes
        T = two_sided_maximal_ideal(M, P) if ramified else None
        logger.debug(f"Class enumeration: neighbours at {P} (ramified={ramified})")
        k = 0
        while k < len(reps) and mass < target:
            candidates = [reps[k] * T] if ramified else right_neighbors(reps[k], P)
            for N in candidates:
                key = _class_key(N)
                if not is_new(N, key):
                    continue
                reps.append(N)
                keys.append(key)
                indices.append(unit_data(N.left_order).unit_index)
                mass += Fraction(1, indices[-1])
                logger.debug(f"New class #{len(reps)}: norm {N.norm}, unit index {indices[-1]}, mass {mass}")
                if mass >= target:
                    break
            k += 1

    if mass != target:
        raise ConsistencyError(f"class mass {mass} overshoots the Eichler mass {target}")
    logger.info(f"Found h={len(reps)} right ideal classes, mass {mass}")
    return ClassData(Q, M, reps, indices)


# -- types --------------------------------------------------------------------

def are_conjugate(O: QuatLattice, O2: QuatLattice) -> bool:
    """Whether two maximal orders are conjugate, via the twisted connecting ideal."""
    connecting = O * O2
    return any(is_left_principal(connecting * T) is not None for T in two_sided_ideal_reps(O2))


def maximal_order_types(data: ClassData) -> ClassData:
    """Bucket the left orders of the class representatives by conjugacy.

    Fills ``type_reps`` (sorted by HNF key of the smallest member of each
    bucket) and ``type_index``.
    """
    reps = data.right_ideal_reps
    buckets: list[list[int]] = []
    for k, I in enumerate(reps):
        O = I.left_order
        for bucket in buckets:
            O2 = reps[bucket[0]].left_order
            if order_fingerprint(O) == order_fingerprint(O2) and are_conjugate(O, O2):
                bucket.append(k)
                break
        else:
            buckets.append([k])

    distinguished = [min((reps[k].left_order for k in b), key=lambda O: O.key) for b in buckets]
    order = sorted(range(len(buckets)), key=lambda b: distinguished[b].key)
    data.type_reps = [distinguished[b] for b in order]
    data.type_index = [0] * len(reps)
    for new, b in enumerate(order):
        for k in buckets[b]:
            data.type_index[k] = new
    logger.info(f"Type number t={data.t} (h={data.h})")
    return data


# -- normalizers and two-sided classes ----------------------------------------

@lru_cache(maxsize=None)
def normalizer_data(M: QuatLattice) -> NormalizerData:
    """Normalizer generators from the principal two-sided ideal representatives.

    Raises:
        ConsistencyError: If a generator fails to normalize M or two norm classes coincide.
    """
    reps: list[QuatElem] = []
    for T in two_sided_ideal_reps(M):
        g = is_left_principal(T)
        if g is None:
            continue
        if M.left_scale(g) != M.right_scale(g):
            raise ConsistencyError(f"generator {g} of a two-sided ideal does not normalize the order")
        reps.append(g)
    norms = [g.reduced_norm() for g in reps]
    for a in range(len(norms)):
        for b in range(a):
            if same_norm_class(norms[a], norms[b]):
                raise ConsistencyError(f"normalizer norms {norms[a]} and {norms[b]} share a square class")
    f = int(log2(len(reps)))
    if 2 ** f != len(reps):
        raise ConsistencyError(f"{len(reps)} normalizer cosets is not a power of two")
    return NormalizerData(M, reps, norms, f)


def common_norm_classes(nd_i: NormalizerData, nd_j: NormalizerData) -> int:
    """f_ij with 2^f_ij = |Pi_i cap Pi_j|."""
    common = sum(1 for x in nd_i.Pi if any(same_norm_class(x, y) for y in nd_j.Pi))
    return int(log2(common))


def _count_classes(items: Sequence, equivalent: Callable[[int, int], bool]) -> int:
    parent = list(range(len(items)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for b in range(len(items)):
        for a in range(b):
            ra, rb = find(a), find(b)
            if ra != rb and equivalent(a, b):
                parent[rb] = ra
    return sum(1 for a in range(len(items)) if find(a) == a)


def two_sided_class_number(M: QuatLattice, nd: NormalizerData | None = None) -> int:
    """H(M) by direct counting, checked against 2^(s - f) h_K.

    Raises:
        ConsistencyError: On disagreement with the formula.
    """
    nd = nd or normalizer_data(M)
    Q = M.algebra
    reps = two_sided_ideal_reps(M)
    H = _count_classes(reps, lambda a, b: is_left_principal(reps[b] * ideal_inverse(reps[a])) is not None)
    expected = scaled_power_of_two(class_groups(Q.field).h, Q.s - nd.f_i)
    if H != expected:
        raise ConsistencyError(f"two-sided class number {H} != 2^(s-f) h_K = {expected}")
    return H


def connecting_class_count(M_i: QuatLattice, M_j: QuatLattice, nd_j: NormalizerData | None = None) -> int:
    """Two-sided classes of normal lattices with left order M_i and right order M_j."""
    nd_j = nd_j or normalizer_data(M_j)
    base = M_i * M_j
    lattices = [T * base for T in two_sided_ideal_reps(M_i)]

    def equivalent(a: int, b: int) -> bool:
        for beta in nd_j.coset_reps:
            twisted = lattices[a].right_scale(beta.inverse())
            if is_left_principal(lattices[b] * ideal_inverse(twisted)) is not None:
                return True
        return False

    return _count_classes(lattices, equivalent)


def expected_connecting_count(Q: QuatAlgebra, nd_i: NormalizerData, nd_j: NormalizerData) -> int:
    f_ij = common_norm_classes(nd_i, nd_j)
    return scaled_power_of_two(class_groups(Q.field).h, Q.s - nd_i.f_i - nd_j.f_i + f_ij)


def scaled_power_of_two(h: int, e: int) -> int:
    """h * 2^e as an int; e may be negative as long as 2^-e divides h."""
    value = Fraction(2) ** e * h
    if value.denominator != 1:
        raise ConsistencyError(f"class count h * 2^{e} = {value} is not an integer")
    return int(value)
