"""Trace-form enumeration: principality tests, unit groups and norm equations.

Every search here rests on one fact about a totally positive integer t of K:
Tr_{K/Q}(t) >= [K:Q] with equality only for t = 1.  Searching a trace lattice
up to the bound [K:Q] therefore finds generators, units and norm solutions.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import log2
from typing import Sequence

from app.config import get_settings
from app.errors import ConsistencyError, SearchCapExceeded
from app.field_arith import (
    FieldElem,
    FieldIdeal,
    class_groups,
    factor_ideal,
    ideal_from_factors,
    is_square,
    principal_ideal,
    render_ideal,
    totally_positive_generator,
)
from app.linalg import ShortVector, fincke_pohst, gram_schmidt, is_positive_definite
from app.quat_algebra import QuatElem
from app.zlattice import QuatLattice, right_neighbors, two_sided_maximal_ideal

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TraceGram:
    """Gram matrix of x -> Tr_{K/Q}(weight * n(x)) on a lattice basis."""

    matrix: tuple[tuple[Fraction, ...], ...]
    weight: FieldElem

    def __post_init__(self):
        if not is_positive_definite(self.matrix):
            raise ValueError("trace Gram matrix is not positive definite")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def determinant(self) -> Fraction:
        _, norms = gram_schmidt(self.matrix)
        det = Fraction(1)
        for b in norms:
            det *= b
        return det


@dataclass
class UnitData:
    order: QuatLattice
    norm_one_mod_pm1: int
    unit_index: int
    norm_image_reps: list[FieldElem]
    x_i: int
    # totally positive unit label -> a unit of the order with exactly that norm
    witnesses: dict[int, QuatElem] = field(default_factory=dict)


def trace_gram(L: QuatLattice, w: FieldElem) -> TraceGram:
    """Exact Gram matrix of Tr(w * n) on the HNF basis of L.

    Raises:
        ValueError: If w is not totally positive.
    """
    if not w.is_totally_positive():
        raise ValueError(f"weight {w} is not totally positive")
    T = L.algebra.trace_form(w)
    dim = L.dim
    den2 = L.denominator * L.denominator
    rows = []
    for r in L.basis:
        rT = [sum((r[a] * T[a][b] for a in range(dim) if r[a]), Fraction(0)) for b in range(dim)]
        rows.append(rT)
    matrix = tuple(
        tuple(sum((rows[i][b] * s[b] for b in range(dim) if s[b]), Fraction(0)) / den2 for s in L.basis)
        for i in range(dim)
    )
    return TraceGram(matrix, w)


def short_vectors(G: TraceGram | Sequence[Sequence], bound) -> list[ShortVector]:
    """Nonzero vectors of value <= bound, one per sign pair, sorted by (value, coords).

    Raises:
        ValueError: If a raw matrix is passed that is not positive definite.
    """
    if isinstance(G, TraceGram):
        matrix = G.matrix
    else:
        matrix = [[Fraction(x) for x in row] for row in G]
        if not is_positive_definite(matrix):
            raise ValueError("Gram matrix is not positive definite")
    return fincke_pohst(matrix, bound, tolerance=get_settings().FP_TOLERANCE)


def is_left_principal(J: QuatLattice) -> QuatElem | None:
    """A generator alpha with J = alpha * O_r(J), or None.

    Scans each totally positive generator class w of n(J)^{-1} for x in J with
    Tr(w n(x)) = [K:Q], which forces w n(x) = 1.
    """
    Q = J.algebra
    K = Q.field
    n = Q.degree
    w0 = totally_positive_generator(J.norm.inverse())
    if w0 is None:
        return None
    for u in class_groups(K).totally_positive_unit_reps:
        w = w0 * u
        for coords, value in short_vectors(trace_gram(J, w), n):
            if value != n:
                continue
            alpha = J.element_at(coords)
            if w * alpha.reduced_norm() == K.one:
                return alpha
    return None


@lru_cache(maxsize=None)
def unit_data(M: QuatLattice) -> UnitData:
    """Norm-one units, unit index and norm image of a maximal order.

    Raises:
        ConsistencyError: If the counts violate [M^*:Z_K^*] = |M^(1)/+-1| * 2^x.
    """
    Q = M.algebra
    n = Q.degree
    reps = class_groups(Q.field).totally_positive_unit_reps
    counts: dict[int, int] = {}
    witnesses: dict[int, QuatElem] = {}
    for label, u in enumerate(reps):
        units = []
        for coords, value in short_vectors(trace_gram(M, u.inverse()), n):
            if value != n:
                continue
            alpha = M.element_at(coords)
            if alpha.reduced_norm() == u:
                units.append(alpha)
        if units:
            counts[label] = len(units)
            witnesses[label] = units[0]

    norm_one = counts.get(0, 0)
    if norm_one == 0:
        raise ConsistencyError("the order has no element of norm 1")
    image = sorted(witnesses)
    x = int(log2(len(image)))
    unit_index = sum(counts.values())
    if 2 ** x != len(image) or unit_index != norm_one * 2 ** x:
        raise ConsistencyError(
            f"unit counts {counts} do not factor as |M^(1)/+-1| * 2^x"
        )
    logger.debug(f"Unit data: |M^(1)/+-1|={norm_one} index={unit_index} x={x}")
    return UnitData(
        order=M,
        norm_one_mod_pm1=norm_one,
        unit_index=unit_index,
        norm_image_reps=[reps[label] for label in image],
        x_i=x,
        witnesses=witnesses,
    )


def _search_scaled(M: QuatLattice, a: FieldElem, m: int) -> QuatElem | None:
    # y in M with n(y) = m^2 a gives x = y/m
    target = a * (m * m)
    n = M.algebra.degree
    for coords, value in short_vectors(trace_gram(M, target.inverse()), n):
        if value != n:
            continue
        y = M.element_at(coords)
        if y.reduced_norm() == target:
            return y / m
    return None


def _right_ideals_of_norm(M: QuatLattice, c: FieldIdeal) -> list[QuatLattice]:
    """Integral right M-ideals of norm c, truncated at NORM_IDEAL_LIMIT."""
    Q = M.algebra
    limit = get_settings().NORM_IDEAL_LIMIT
    ideals = [M]
    for P, e in factor_ideal(c):
        for _ in range(e):
            if P in Q.ramified_primes:
                T = two_sided_maximal_ideal(M, P)
                step = [I * T for I in ideals]
            else:
                step = [N for I in ideals for N in right_neighbors(I, P)]
            unique = {N.key: N for N in step}
            ideals = [unique[k] for k in sorted(unique)]
            if len(ideals) > limit:
                logger.warning(f"Truncating {len(ideals)} right ideals of norm {render_ideal(c)} to NORM_IDEAL_LIMIT={limit}")
                ideals = ideals[:limit]
    return ideals


def _principal_ideal_phase(M: QuatLattice, a: FieldElem, witnesses: dict[int, QuatElem]) -> QuatElem | None:
    K = a.field
    groups = class_groups(K)
    factors = factor_ideal(principal_ideal(a))
    scale = ideal_from_factors(K, [(P, (1 - v) // 2) for P, v in factors if v < 0])
    target = principal_ideal(a) * scale * scale
    for I in _right_ideals_of_norm(M, target):
        g = is_left_principal(I.ideal_scale(scale.inverse()))
        if g is None:
            continue
        t = g.reduced_norm() / a
        label = groups.unit_label(t)
        if label == 0:
            return g / is_square(t)
        beta = witnesses.get(label)
        if beta is None:
            continue
        eta = is_square(t / beta.reduced_norm())
        if eta is not None:
            return g * beta.inverse() / eta
    return None


def solve_norm_equation(
    M: QuatLattice,
    a: FieldElem,
    denominator_cap: int | None = None,
    witnesses: dict[int, QuatElem] | None = None,
) -> QuatElem:
    """Some x in the algebra with n(x) = a exactly.

    Tries x in M, then generators of principal right M-ideals of norm (a), then
    x in (1/m)M for m = 2, 3, ... up to the denominator cap.

    Raises:
        ValueError: If a is not totally positive.
        SearchCapExceeded: If no solution turns up below the cap.
    """
    if not a.is_totally_positive():
        raise ValueError(f"{a} is not totally positive")
    cap = denominator_cap or get_settings().DENOMINATOR_CAP

    if a.is_integral():
        x = _search_scaled(M, a, 1)
        if x is not None:
            return x

    if witnesses is None:
        witnesses = unit_data(M).witnesses
    x = _principal_ideal_phase(M, a, witnesses)
    if x is not None:
        return x

    logger.warning(f"No principal right ideal of norm ({a}); searching denominators up to {cap}")
    for m in range(2, cap + 1):
        if not (a * (m * m)).is_integral():
            continue
        x = _search_scaled(M, a, m)
        if x is not None:
            logger.info(f"Solved n(x) = {a} with denominator {m}")
            return x
    raise SearchCapExceeded(f"no x with n(x) = {a} and denominator <= {cap}")


def lattice_minimum(L: QuatLattice, w: FieldElem | None = None) -> Fraction:
    """Minimum of Tr(w * n) on L, w = 1 by default."""
    G = trace_gram(L, w if w is not None else L.algebra.field.one)
    bound = min(G.matrix[i][i] for i in range(G.dim))
    return short_vectors(G, bound)[0].value
