"""Proper isometry classes in the genus of a-maximal lattices in (Q, n).

The pipeline runs on the class and type data of one maximal order: products
I_j M_i in the right narrow class, orbits of the normalizer of M_i, a scaling
by an element of norm a_J and one twist per unit coset outside U(J).
"""
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm, log2
from typing import Callable, Sequence, TypeVar

from app.class_sets import (
    ClassData,
    NormalizerData,
    common_norm_classes,
    connecting_class_count,
    eichler_mass,
    expected_connecting_count,
    maximal_order_types,
    narrow_class_mass,
    normalizer_data,
    order_fingerprint,
    principal_square_root,
    right_ideal_classes,
    two_sided_class_number,
)
from app.config import get_settings
from app.enumeration import (
    TraceGram,
    UnitData,
    is_left_principal,
    lattice_minimum,
    solve_norm_equation,
    trace_gram,
    unit_data,
)
from app.errors import ConsistencyError, QuaternaryError
from app.field_arith import (
    FieldElem,
    FieldIdeal,
    class_groups,
    is_square,
    narrow_class_index,
    totally_positive_generator,
    zeta_minus_one,
)
from app.linalg import integer_determinant
from app.models import CheckResult, CheckStatus
from app.quat_algebra import QuatAlgebra, QuatElem
from app.zlattice import QuatLattice, ideal_inverse, is_maximal, maximal_order

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class PairInvariants:
    i: int
    j: int
    f_i: int
    f_j: int
    f_ij: int
    x_i: int
    x_j: int
    y_ij: int
    z_ij: int
    u: int
    U_J: frozenset[int]


@dataclass
class AlgebraData:
    """Everything the genus pipeline needs about one algebra, computed once."""

    algebra: QuatAlgebra
    M: QuatLattice
    classes: ClassData
    units: list[UnitData]
    normalizers: list[NormalizerData]
    pair_cache: dict[tuple[int, int], PairInvariants] = field(default_factory=dict)

    @property
    def t(self) -> int:
        return self.classes.t


@dataclass(frozen=True)
class SMember:
    j: int
    ideal: QuatLattice


@dataclass
class GenusRep:
    ideal: QuatLattice
    J: QuatLattice
    x_J: QuatElem
    alpha_u: QuatElem
    unit_label: int
    # (ideal, n) is isometric to (J, weight * n)
    weight: FieldElem
    left_type: int
    right_type: int
    aut_plus_order: int
    trace_gram: TraceGram


@dataclass(frozen=True)
class RescaledGram:
    """matrix = scale * gram, primitive and integral."""

    matrix: tuple[tuple[int, ...], ...]
    scale: Fraction
    determinant: int


_algebra_cache: dict[QuatAlgebra, AlgebraData] = {}
_algebra_lock = threading.Lock()


def _run_parallel(fn: Callable[[T], R], items: Sequence[T], threads: int | None) -> list[R]:
    workers = threads or get_settings().THREADS
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def initialize_algebra_data(Q: QuatAlgebra) -> AlgebraData:
    logger.info(f"Computing maximal order, ideal classes and types of {Q}")
    M = maximal_order(Q)
    classes = maximal_order_types(right_ideal_classes(M))
    units = [unit_data(O) for O in classes.type_reps]
    normalizers = [normalizer_data(O) for O in classes.type_reps]
    return AlgebraData(Q, M, classes, units, normalizers)


def get_algebra_data(Q: QuatAlgebra) -> AlgebraData:
    """Class, type, unit and normalizer data of Q, computed on first use."""
    data = _algebra_cache.get(Q)
    if data is not None:
        return data
    with _algebra_lock:
        if Q not in _algebra_cache:
            _algebra_cache[Q] = initialize_algebra_data(Q)
        return _algebra_cache[Q]


def clear_caches() -> None:
    """Drop memoized algebra data and the per-lattice caches behind it.

    Every cache is unbounded, which suits one CLI run. Long-lived callers that
    work through many algebras call this between them. Per-field caches
    (class groups, primes, units of K) are kept.
    """
    with _algebra_lock:
        _algebra_cache.clear()
    for cached in (maximal_order, is_maximal, unit_data, order_fingerprint, normalizer_data):
        cached.cache_clear()
    logger.debug("Cleared algebra and lattice caches")


# -- steps of the enumeration -------------------------------------------------

def is_a_maximal(L: QuatLattice, a: FieldIdeal) -> bool:
    """L is normal with n(L) = a."""
    return is_maximal(L.left_order) and is_maximal(L.right_order) and L.norm == a


def build_S_i(data: ClassData, M_i: QuatLattice, a: FieldIdeal) -> list[SMember]:
    """The products I_j M_i whose norm lies in the narrow class of a."""
    target = narrow_class_index(a)
    members = []
    for j, I in enumerate(data.right_ideal_reps):
        product = I * M_i
        if narrow_class_index(product.norm) == target:
            members.append(SMember(j, product))
    return members


def _match_member(S: Sequence[SMember], X: QuatLattice) -> int:
    fingerprint = order_fingerprint(X.left_order)
    for m, member in enumerate(S):
        if order_fingerprint(member.ideal.left_order) != fingerprint:
            continue
        if is_left_principal(X * ideal_inverse(member.ideal)) is not None:
            return m
    raise ConsistencyError("I g^-1 is left equivalent to no member of S_i")


def normalizer_orbits(S: Sequence[SMember], nd: NormalizerData) -> list[SMember]:
    """Orbit representatives (HNF-minimal member) of I -> I g^-1 on S."""
    seen: set[int] = set()
    reps = []
    for start in range(len(S)):
        if start in seen:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            k = frontier.pop()
            for g in nd.coset_reps:
                image = _match_member(S, S[k].ideal.right_scale(g.inverse()))
                if image not in orbit:
                    orbit.add(image)
                    frontier.append(image)
        seen |= orbit
        reps.append(S[min(orbit, key=lambda k: S[k].ideal.key)])
    return reps


def _span(labels: set[int]) -> frozenset[int]:
    group = {0}
    for g in labels:
        group |= {h ^ g for h in group}
    return frozenset(group)


def compute_U(nd_left: NormalizerData, nd_right: NormalizerData, ud_left: UnitData, ud_right: UnitData) -> frozenset[int]:
    """U(J)/(Z_K^*)^2 as a set of totally positive unit labels."""
    groups = class_groups(nd_left.order.algebra.field)
    labels = {groups.unit_label(w) for w in ud_left.norm_image_reps + ud_right.norm_image_reps}
    for nl in nd_left.Pi:
        for nr in nd_right.Pi:
            c = principal_square_root(nl / nr)
            if c is not None:
                labels.add(groups.unit_label(nl / (nr * c * c)))
    return _span(labels)


def pair_invariants(i: int, j: int, data: AlgebraData) -> PairInvariants:
    """Index data of the pair of types (i, j), with y counted directly.

    Raises:
        ConsistencyError: If y - z + u != f_ij + x_i + x_j.
    """
    cached = data.pair_cache.get((i, j))
    if cached is not None:
        return cached
    nd_i, nd_j = data.normalizers[i], data.normalizers[j]
    ud_i, ud_j = data.units[i], data.units[j]
    u = class_groups(data.algebra.field).u
    U = compute_U(nd_i, nd_j, ud_i, ud_j)
    z = u - int(log2(len(U)))
    f_ij = common_norm_classes(nd_i, nd_j)

    # N/(K^* M^(1)) is represented by normalizer coset reps times unit witnesses
    left = [g * w for g in nd_i.coset_reps for w in ud_i.witnesses.values()]
    right = [g * w for g in nd_j.coset_reps for w in ud_j.witnesses.values()]
    count = sum(
        1 for a in left for b in right if is_square(a.reduced_norm() / b.reduced_norm()) is not None
    )
    y = int(log2(count))
    if 2 ** y != count:
        raise ConsistencyError(f"|V_ij / M^(1) x M^(1)| = {count} is not a power of two")
    if y - z + u != f_ij + ud_i.x_i + ud_j.x_i:
        raise ConsistencyError(
            f"types ({i},{j}): y - z + u = {y - z + u} but f_ij + x_i + x_j = {f_ij + ud_i.x_i + ud_j.x_i}"
        )
    inv = PairInvariants(i, j, nd_i.f_i, nd_j.f_i, f_ij, ud_i.x_i, ud_j.x_i, y, z, u, U)
    data.pair_cache[(i, j)] = inv
    return inv


def proper_automorphism_order(inv: PairInvariants, ud_left: UnitData, ud_right: UnitData) -> int:
    """(1/2)|M_i^(1)||M_j^(1)| 2^y, cross-checked against the index identity.

    Raises:
        ConsistencyError: If the directly counted y disagrees with the identity.
    """
    y_formula = inv.f_ij + inv.x_i + inv.x_j - inv.u + inv.z_ij
    if y_formula != inv.y_ij:
        raise ConsistencyError(f"Aut+ exponent {inv.y_ij} != {y_formula} from the index identity")
    return 2 * ud_left.norm_one_mod_pm1 * ud_right.norm_one_mod_pm1 * 2 ** inv.y_ij


def unit_coset_reps(U: frozenset[int], u: int) -> list[int]:
    """Smallest label of each coset of U in Z_{K,>0}^*/(Z_K^*)^2."""
    return sorted({min(label ^ g for g in U) for label in range(2 ** u)})


def _alpha_for_label(data: AlgebraData, label: int, cap: int | None) -> QuatElem:
    Q = data.algebra
    if label == 0:
        return Q.one
    for ud in data.units:
        if label in ud.witnesses:
            return ud.witnesses[label]
    u = class_groups(Q.field).totally_positive_unit_reps[label]
    return solve_norm_equation(data.M, u, cap, witnesses=unit_data(data.M).witnesses)


def genus_representatives(
    Q: QuatAlgebra,
    a: FieldIdeal,
    threads: int | None = None,
    denominator_cap: int | None = None,
) -> list[GenusRep]:
    """One lattice per proper isometry class in the genus of a-maximal lattices.

    Raises:
        ConsistencyError: If an output fails the a-maximality certificate.
        SearchCapExceeded: If a norm equation exceeds the denominator cap.
    """
    data = get_algebra_data(Q)
    K = Q.field
    groups = class_groups(K)
    classes = data.classes

    def orbits(i: int) -> list[SMember]:
        S = build_S_i(classes, classes.type_reps[i], a)
        T_i = normalizer_orbits(S, data.normalizers[i])
        logger.debug(f"Type {i}: |S_i|={len(S)} |T_i|={len(T_i)}")
        return T_i

    per_type = _run_parallel(orbits, list(range(data.t)), threads)
    jobs = [(i, member) for i, T_i in enumerate(per_type) for member in T_i]

    witnesses = unit_data(data.M).witnesses
    solutions: dict[FieldElem, QuatElem] = {}
    alphas: dict[int, QuatElem] = {}
    one = K.one

    for i, member in jobs:
        a_J = totally_positive_generator(member.ideal.norm.inverse() * a)
        if a_J is None:
            raise ConsistencyError(f"n(J)^-1 a has no totally positive generator for J in S_{i}")
        if a_J not in solutions:
            solutions[a_J] = solve_norm_equation(data.M, a_J, denominator_cap, witnesses=witnesses)

    def represent(job: tuple[int, SMember]) -> list[GenusRep]:
        i, member = job
        J = member.ideal
        left = classes.type_index[member.j]
        inv = pair_invariants(left, i, data)
        aut = proper_automorphism_order(inv, data.units[left], data.units[i])
        a_J = totally_positive_generator(J.norm.inverse() * a)
        x_J = solutions[a_J]
        out = []
        for label in unit_coset_reps(inv.U_J, groups.u):
            alpha = alphas[label]
            L = J.left_scale(alpha * x_J)
            if not is_a_maximal(L, a):
                raise ConsistencyError(f"scaled lattice for type pair ({left},{i}) is not a-maximal")
            out.append(GenusRep(
                ideal=L,
                J=J,
                x_J=x_J,
                alpha_u=alpha,
                unit_label=label,
                weight=alpha.reduced_norm() * a_J,
                left_type=left,
                right_type=i,
                aut_plus_order=aut,
                trace_gram=trace_gram(L, one),
            ))
        return out

    # pair invariants are filled sequentially so the workers only read the cache
    for i, member in jobs:
        inv = pair_invariants(classes.type_index[member.j], i, data)
        for label in unit_coset_reps(inv.U_J, groups.u):
            if label not in alphas:
                alphas[label] = _alpha_for_label(data, label, denominator_cap)

    reps = [rep for batch in _run_parallel(represent, jobs, threads) for rep in batch]
    logger.info(f"Genus of {a}-maximal lattices: {len(reps)} proper classes from {len(jobs)} orbit representatives")
    return reps


# -- masses and lattice data --------------------------------------------------

def siegel_mass(Q: QuatAlgebra, a: FieldIdeal | None = None) -> Fraction:
    """2^(1-2[K:Q]) zeta_K(-1)^2 prod (N(p)-1)^2/2; independent of a."""
    K = Q.field
    mass = Fraction(2) ** (1 - 2 * K.degree) * zeta_minus_one(K) ** 2
    for P in Q.ramified_primes:
        mass *= Fraction((P.norm - 1) ** 2, 2)
    return mass


def genus_mass(reps: Sequence[GenusRep]) -> Fraction:
    return sum((Fraction(1, rep.aut_plus_order) for rep in reps), Fraction(0))


def integral_rescaling(gram: TraceGram | Sequence[Sequence]) -> RescaledGram:
    matrix = gram.matrix if isinstance(gram, TraceGram) else gram
    entries = [Fraction(x) for row in matrix for x in row]
    den = lcm(*(x.denominator for x in entries))
    num = gcd(*(x.numerator * (den // x.denominator) for x in entries))
    scale = Fraction(den, num)
    scaled = tuple(tuple(int(Fraction(x) * scale) for x in row) for row in matrix)
    return RescaledGram(scaled, scale, integer_determinant(scaled))


def trace_lattice_minimum(rep: GenusRep) -> Fraction:
    return lattice_minimum(rep.ideal)


def norm_class_table(data: AlgebraData) -> list[list[int]]:
    """Narrow class index of n(M_i M_j) for every pair of types."""
    types = data.classes.type_reps
    return [[narrow_class_index((Mi * Mj).norm) for Mj in types] for Mi in types]


# -- verification -------------------------------------------------------------

def _check(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    try:
        ok, detail = fn()
    except QuaternaryError as e:
        logger.error(f"Check {name} raised: {e}")
        return CheckResult(name=name, status=CheckStatus.FAIL, detail=str(e))
    status = CheckStatus.PASS if ok else CheckStatus.FAIL
    if not ok:
        logger.error(f"Check {name} failed: {detail}")
    return CheckResult(name=name, status=status, detail=detail)


def verify_algebra(Q: QuatAlgebra, threads: int | None = None, denominator_cap: int | None = None) -> list[CheckResult]:
    """Run every consistency identity available for Q as named checks."""
    data = get_algebra_data(Q)
    K = Q.field
    groups = class_groups(K)
    classes = data.classes
    checks: list[CheckResult] = []

    def eichler_closure():
        total = sum((Fraction(1, k) for k in classes.left_unit_indices), Fraction(0))
        return total == eichler_mass(Q), f"sum={total} mass={eichler_mass(Q)}"

    checks.append(_check("eichler_mass_closure", eichler_closure))

    def narrow_partition():
        counts = [
            sum(1 for I in classes.right_ideal_reps if narrow_class_index(I.norm) == k)
            for k in range(groups.h_plus)
        ]
        masses = [narrow_class_mass(classes, rep) for rep in groups.narrow_reps]
        expected = eichler_mass(Q) / groups.h_plus
        ok = sum(counts) == classes.h and all(m == expected for m in masses)
        return ok, f"classes per narrow class={counts} masses={[str(m) for m in masses]}"

    checks.append(_check("narrow_class_partition", narrow_partition))

    for i, O in enumerate(classes.type_reps):
        checks.append(_check(
            f"two_sided_class_number[{i}]",
            lambda O=O, i=i: (True, f"H={two_sided_class_number(O, data.normalizers[i])}"),
        ))

    def index_identity():
        for i in range(data.t):
            for j in range(data.t):
                pair_invariants(i, j, data)
        return True, f"{data.t * data.t} type pairs"

    checks.append(_check("pair_index_identity", index_identity))

    def connecting_counts():
        bad = []
        for i, Mi in enumerate(classes.type_reps):
            for j, Mj in enumerate(classes.type_reps):
                count = connecting_class_count(Mi, Mj, data.normalizers[j])
                expected = expected_connecting_count(Q, data.normalizers[i], data.normalizers[j])
                if count != expected:
                    bad.append(f"({i},{j}): {count} != {expected}")
        return not bad, "; ".join(bad) or f"{data.t * data.t} type pairs"

    checks.append(_check("connecting_class_counts", connecting_counts))

    siegel = siegel_mass(Q)
    for k, a in enumerate(groups.narrow_reps):
        def genus_closure(a=a):
            reps = genus_representatives(Q, a, threads, denominator_cap)
            mass = genus_mass(reps)
            ok = mass == siegel and all(is_a_maximal(rep.ideal, a) for rep in reps)
            return ok, f"classes={len(reps)} mass={mass} siegel={siegel}"

        checks.append(_check(f"genus_mass_closure[{k}]", genus_closure))

    def type_sum():
        h = groups.h
        total = Fraction(0)
        for i in range(data.t):
            for j in range(data.t):
                inv = pair_invariants(i, j, data)
                count = expected_connecting_count(Q, data.normalizers[i], data.normalizers[j])
                aut = proper_automorphism_order(inv, data.units[i], data.units[j])
                total += Fraction(2) ** inv.z_ij * Fraction(count) / aut
        global_mass = eichler_mass(Q) ** 2 * Fraction(groups.h_plus, h * h) / 2 ** (1 + Q.s)
        ok = total == global_mass == groups.h_plus * siegel
        return ok, f"type sum={total} Mass(M)^2 h+/h^2 2^(-1-s)={global_mass} h+ * siegel={groups.h_plus * siegel}"

    checks.append(_check("global_siegel_identity", type_sum))
    return checks
