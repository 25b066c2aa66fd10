"""Exact lattice linear algebra shared by the field, ideal and lattice layers.

Lattices are handled as lists of row vectors.  Hermite and Smith normal forms
come from sympy's ``DomainMatrix`` machinery, rational inverses go through
``DomainMatrix`` over ``QQ``.  Short-vector enumeration follows Fincke-Pohst on
an LLL-reduced Gram matrix; floats are only used to prune the search tree and
every returned vector is verified in exact arithmetic.
"""
import logging
import math
from fractions import Fraction
from itertools import product
from math import gcd, lcm
from typing import Iterator, NamedTuple, Sequence

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form, smith_normal_form

logger = logging.getLogger(__name__)

Vector = tuple[Fraction, ...]
IntMatrix = tuple[tuple[int, ...], ...]


class ShortVector(NamedTuple):
    coords: tuple[int, ...]
    value: Fraction


def common_denominator(rows: Sequence[Sequence]) -> int:
    den = 1
    for row in rows:
        for x in row:
            den = lcm(den, x.denominator)
    return den


def _hnf_columns(rows: list[list[int]], dim: int) -> list[list[int]]:
    matrix = DomainMatrix(
        [[ZZ(row[i]) for row in rows] for i in range(dim)], (dim, len(rows)), ZZ
    )
    reduced = hermite_normal_form(matrix).to_Matrix()
    return [[int(reduced[i, j]) for i in range(dim)] for j in range(reduced.cols)]


def integer_hnf(rows: Sequence[Sequence[int]], dim: int) -> IntMatrix:
    """Row Hermite normal form of the Z-span of ``rows``.

    The result is lower triangular with a positive diagonal.  Generators are
    folded in batches of ``dim`` so intermediate entries stay bounded by the
    current basis.

    Raises:
        ValueError: If the rows do not span a lattice of full rank ``dim``.
    """
    pending = [[int(x) for x in row] for row in rows]
    basis: list[list[int]] = []
    for start in range(0, len(pending), dim):
        batch = basis + [row for row in pending[start:start + dim] if any(row)]
        if batch:
            basis = _hnf_columns(batch, dim)
    if len(basis) != dim:
        raise ValueError(f"generators span rank {len(basis)}, expected full rank {dim}")
    return tuple(tuple(row) for row in basis)


def rational_hnf(vectors: Sequence[Sequence], dim: int) -> tuple[IntMatrix, int]:
    """Canonical (integer HNF, positive denominator) pair for a rational lattice."""
    den = common_denominator(vectors)
    rows = [[int(x * den) for x in v] for v in vectors]
    basis = integer_hnf(rows, dim)
    g = gcd(den, *(x for row in basis for x in row))
    if g > 1:
        basis = tuple(tuple(x // g for x in row) for row in basis)
        den //= g
    return basis, den


def lattice_coordinates(basis: IntMatrix, den: int, v: Sequence) -> tuple[int, ...] | None:
    """Integer coordinates of ``v`` in the lattice ``basis / den``, or None."""
    dim = len(basis)
    w = [Fraction(x) * den for x in v]
    coeffs = [0] * dim
    for k in reversed(range(dim)):
        if w[k] == 0:
            continue
        c = w[k] / basis[k][k]
        if c.denominator != 1:
            return None
        c = int(c)
        coeffs[k] = c
        row = basis[k]
        for i in range(k + 1):
            w[i] -= c * row[i]
    return tuple(coeffs)


def quotient_representatives(basis: IntMatrix, den: int, sub_vectors: Sequence[Sequence]) -> Iterator[tuple[int, ...]]:
    """Coordinates in ``basis`` of one representative per coset of a full sublattice."""
    coords = []
    for v in sub_vectors:
        c = lattice_coordinates(basis, den, v)
        if c is None:
            raise ValueError("sublattice is not contained in the lattice")
        coords.append(c)
    relative = integer_hnf(coords, len(basis))
    yield from product(*(range(relative[k][k]) for k in range(len(basis))))


def rational_inverse(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(matrix)
    dm = DomainMatrix(
        [[QQ(int(Fraction(x).numerator), int(Fraction(x).denominator)) for x in row] for row in matrix],
        (n, n),
        QQ,
    )
    inv = dm.inv().to_Matrix()
    return [[Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(n)] for i in range(n)]


def integer_determinant(matrix: Sequence[Sequence[int]]) -> int:
    n = len(matrix)
    dm = DomainMatrix([[ZZ(int(x)) for x in row] for row in matrix], (n, n), ZZ)
    return int(dm.det())


def dual_basis(vectors: Sequence[Sequence]) -> list[Vector]:
    """Basis of the dual lattice with respect to the standard dot product."""
    inv = rational_inverse(vectors)
    n = len(inv)
    return [tuple(inv[j][i] for j in range(n)) for i in range(n)]


def smith_invariants(rows: Sequence[Sequence[int]], dim: int) -> list[int]:
    """Nontrivial invariant factors of Z^dim modulo the span of ``rows``."""
    matrix = DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], (len(rows), dim), ZZ)
    snf = smith_normal_form(matrix).to_Matrix()
    diagonal = [abs(int(snf[i, i])) for i in range(min(snf.rows, snf.cols))]
    return [d for d in diagonal if d != 1]


def gram_schmidt(gram: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Exact Gram-Schmidt data (mu, B) of a Gram matrix."""
    n = len(gram)
    mu = [[Fraction(0)] * n for _ in range(n)]
    norms = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            s = Fraction(gram[i][j]) - sum((mu[j][k] * mu[i][k] * norms[k] for k in range(j)), Fraction(0))
            mu[i][j] = s / norms[j]
        norms[i] = Fraction(gram[i][i]) - sum((mu[i][k] ** 2 * norms[k] for k in range(i)), Fraction(0))
        if norms[i] <= 0:
            raise ValueError("Gram matrix is not positive definite")
    return mu, norms


def is_positive_definite(gram: Sequence[Sequence[Fraction]]) -> bool:
    try:
        gram_schmidt(gram)
    except ValueError:
        return False
    return True


def _apply_row_operation(gram: list[list[Fraction]], transform: list[list[int]], k: int, j: int, q: int) -> None:
    # b_k <- b_k - q b_j
    n = len(gram)
    diagonal = gram[k][k] - 2 * q * gram[k][j] + q * q * gram[j][j]
    for col in range(n):
        if col != k:
            gram[k][col] -= q * gram[j][col]
            gram[col][k] = gram[k][col]
    gram[k][k] = diagonal
    transform[k] = [a - q * b for a, b in zip(transform[k], transform[j])]


def _swap(gram: list[list[Fraction]], transform: list[list[int]], k: int) -> None:
    gram[k], gram[k - 1] = gram[k - 1], gram[k]
    for row in gram:
        row[k], row[k - 1] = row[k - 1], row[k]
    transform[k], transform[k - 1] = transform[k - 1], transform[k]


def lll_gram(gram: Sequence[Sequence], delta: Fraction = Fraction(99, 100)) -> tuple[list[list[int]], list[list[Fraction]]]:
    """LLL reduction acting on a Gram matrix.

    Returns (U, G') with U unimodular and G' = U G U^T.
    """
    n = len(gram)
    g = [[Fraction(x) for x in row] for row in gram]
    transform = [[int(i == j) for j in range(n)] for i in range(n)]
    k = 1
    while k < n:
        mu, norms = gram_schmidt(g)
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                _apply_row_operation(g, transform, k, j, q)
                for l in range(j):
                    mu[k][l] -= q * mu[j][l]
                mu[k][j] -= q
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            _swap(g, transform, k)
            k = max(k - 1, 1)
    return transform, g


def quadratic_value(gram: Sequence[Sequence], v: Sequence[int]) -> Fraction:
    total = Fraction(0)
    n = len(v)
    for i in range(n):
        if not v[i]:
            continue
        row = gram[i]
        s = sum((row[j] * v[j] for j in range(n) if v[j]), Fraction(0))
        total += v[i] * s
    return total


def fincke_pohst(gram: Sequence[Sequence], bound, tolerance: float = 1e-6, reduce: bool = True) -> list[ShortVector]:
    """All nonzero v with v^T G v <= bound, one of each pair +-v.

    The enumeration runs on an LLL-reduced copy of ``gram`` with floating point
    pruning widened by ``tolerance``; acceptance is decided exactly.
    """
    bound = Fraction(bound)
    n = len(gram)
    if bound <= 0:
        return []
    if reduce and n > 1:
        transform, reduced = lll_gram(gram)
    else:
        transform = [[int(i == j) for j in range(n)] for i in range(n)]
        reduced = [[Fraction(x) for x in row] for row in gram]
    mu, norms = gram_schmidt(reduced)
    fmu = [[float(x) for x in row] for row in mu]
    fnorms = [float(x) for x in norms]
    fbound = float(bound) * (1 + tolerance) + tolerance

    found: list[ShortVector] = []
    x = [0] * n

    def descend(level: int, remaining: float, zero_above: bool) -> None:
        center = -sum(fmu[j][level] * x[j] for j in range(level + 1, n))
        radius = math.sqrt(max(remaining, 0.0) / fnorms[level])
        lo = math.ceil(center - radius - tolerance)
        hi = math.floor(center + radius + tolerance)
        if zero_above:
            lo = max(lo, 0)
        for value in range(lo, hi + 1):
            x[level] = value
            rest = remaining - fnorms[level] * (value - center) ** 2
            if rest < -tolerance * (1 + fbound):
                continue
            if level == 0:
                if zero_above and value == 0:
                    continue
                exact = quadratic_value(reduced, x)
                if exact <= bound:
                    found.append(ShortVector(tuple(x), exact))
            else:
                descend(level - 1, rest, zero_above and value == 0)
        x[level] = 0

    descend(n - 1, fbound, True)

    result = []
    for w, value in found:
        v = [sum(w[i] * transform[i][j] for i in range(n)) for j in range(n)]
        first = next(c for c in v if c)
        if first < 0:
            v = [-c for c in v]
        result.append(ShortVector(tuple(v), value))
    result.sort(key=lambda sv: (sv.value, sv.coords))
    return result
