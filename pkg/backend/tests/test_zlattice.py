import pytest
from fractions import Fraction
from unittest.mock import patch


class TestLatticeBasics:
    """Test canonical lattices, products and orders"""

    def test_standard_order_is_frame(self, hurwitz_algebra):
        from app.zlattice import standard_order

        L = standard_order(hurwitz_algebra)

        assert L.denominator == 1
        assert L.volume == 1
        assert L.contains(hurwitz_algebra.elem(1, 2, 3, 4))
        assert not L.contains(hurwitz_algebra.elem(Fraction(1, 2)))

    def test_canonical_form(self, hurwitz_algebra):
        """Different generating sets give equal lattices"""
        from app.zlattice import lattice_from_generators, standard_order

        Q = hurwitz_algebra
        gens = [Q.elem(1), Q.elem(1, 1), Q.elem(0, 0, 1), Q.elem(0, 0, 1, 1), Q.elem(2, 3)]

        assert lattice_from_generators(Q, gens) == standard_order(Q)

    def test_generators_checked_as_module(self, q15_algebra):
        from app.zlattice import lattice_from_generators, lattice_from_vectors, standard_order

        O = standard_order(q15_algebra)
        with patch('app.zlattice.lattice_from_vectors', wraps=lattice_from_vectors) as spy:
            L = lattice_from_generators(q15_algebra, O.elements()[::2])

        assert L == O
        assert spy.call_args.kwargs.get("check", True) is True

    def test_non_module_rejected(self, q15_algebra):
        """A Z-lattice that is not closed under w"""
        from app.zlattice import lattice_from_vectors

        Q = q15_algebra
        vectors = [[int(i == j) * (2 if i == 1 else 1) for j in range(8)] for i in range(8)]

        with pytest.raises(ValueError, match="Z_K-module"):
            lattice_from_vectors(Q, vectors)

    def test_lipschitz_discriminant(self, hurwitz_algebra):
        from app.zlattice import reduced_discriminant, standard_order, is_maximal

        O = standard_order(hurwitz_algebra)

        assert reduced_discriminant(O).norm == 4
        assert not is_maximal(O)

    def test_orders_of_an_order(self, hurwitz_order):
        from app.zlattice import lattice_norm

        assert hurwitz_order.right_order == hurwitz_order
        assert hurwitz_order.left_order == hurwitz_order
        assert lattice_norm(hurwitz_order).is_one()

    def test_sum_and_product(self, hurwitz_algebra, hurwitz_order):
        from app.zlattice import standard_order

        L = standard_order(hurwitz_algebra)

        assert L + hurwitz_order == hurwitz_order
        assert hurwitz_order * hurwitz_order == hurwitz_order
        assert L.issubset(hurwitz_order)


class TestMaximalOrders:
    """Test maximal order construction and discriminants"""

    def test_hurwitz_order(self, hurwitz_algebra, hurwitz_order):
        """The enlargement of the Lipschitz order contains (1+i+j+k)/2"""
        from app.zlattice import is_maximal, reduced_discriminant

        half = Fraction(1, 2)

        assert is_maximal(hurwitz_order)
        assert reduced_discriminant(hurwitz_order).norm == 2
        assert hurwitz_order.volume == half
        assert hurwitz_order.contains(hurwitz_algebra.elem(half, half, half, half))

    def test_q11_order(self, q11_order):
        from app.zlattice import is_maximal, reduced_discriminant

        assert is_maximal(q11_order)
        assert reduced_discriminant(q11_order).norm == 11

    def test_q15_order_unit_discriminant(self, q15_algebra):
        from app.zlattice import maximal_order, reduced_discriminant

        M = maximal_order(q15_algebra)

        assert reduced_discriminant(M).is_one()
        assert M.right_order == M


class TestIdeals:
    """Test two-sided ideals, neighbours and inverses"""

    def test_ramified_two_sided_ideal(self, hurwitz_algebra, hurwitz_order):
        """The prime over 2 is (1+i)M, and its square is 2M"""
        from app.field_arith import make_ideal
        from app.zlattice import two_sided_maximal_ideal

        P = make_ideal(hurwitz_algebra.field, [2])
        T = two_sided_maximal_ideal(hurwitz_order, P)

        assert T == hurwitz_order.left_scale(hurwitz_algebra.elem(1, 1))
        assert T.norm == P
        assert T * T == hurwitz_order.ideal_scale(P)

    def test_unramified_two_sided_ideal(self, hurwitz_algebra, hurwitz_order):
        from app.field_arith import make_ideal
        from app.zlattice import two_sided_maximal_ideal

        P = make_ideal(hurwitz_algebra.field, [3])

        assert two_sided_maximal_ideal(hurwitz_order, P) == hurwitz_order.ideal_scale(P)

    def test_non_prime_rejected(self, hurwitz_algebra, hurwitz_order):
        from app.field_arith import make_ideal
        from app.zlattice import two_sided_maximal_ideal

        with pytest.raises(ValueError, match="not a prime"):
            two_sided_maximal_ideal(hurwitz_order, make_ideal(hurwitz_algebra.field, [6]))

    def test_neighbours(self, hurwitz_algebra, hurwitz_order):
        """q + 1 neighbours of norm P at an unramified prime"""
        from app.field_arith import make_ideal
        from app.zlattice import right_neighbors, is_maximal

        P = make_ideal(hurwitz_algebra.field, [3])
        neighbours = right_neighbors(hurwitz_order, P)

        assert len(neighbours) == 4
        assert len({N.key for N in neighbours}) == 4
        for N in neighbours:
            assert N.norm == P
            assert N.right_order == hurwitz_order
            assert is_maximal(N.left_order)
            assert N.issubset(hurwitz_order)

    def test_neighbours_at_ramified_prime(self, hurwitz_algebra, hurwitz_order):
        from app.field_arith import make_ideal
        from app.zlattice import right_neighbors

        with pytest.raises(ValueError, match="ramified"):
            right_neighbors(hurwitz_order, make_ideal(hurwitz_algebra.field, [2]))

    def test_inverse(self, hurwitz_algebra, hurwitz_order):
        from app.field_arith import make_ideal
        from app.zlattice import ideal_inverse, right_neighbors, conj_lattice

        I = right_neighbors(hurwitz_order, make_ideal(hurwitz_algebra.field, [3]))[0]

        assert ideal_inverse(hurwitz_order) == hurwitz_order
        assert I * ideal_inverse(I) == I.left_order
        assert ideal_inverse(I) * I == I.right_order
        assert conj_lattice(conj_lattice(I)) == I

    def test_inverse_needs_normal_lattice(self, hurwitz_algebra):
        from app.zlattice import ideal_inverse, standard_order

        with pytest.raises(ValueError, match="normal"):
            ideal_inverse(standard_order(hurwitz_algebra))

    def test_two_sided_reps(self, hurwitz_order, q15_algebra):
        """2^s h_K representatives"""
        from app.zlattice import maximal_order, two_sided_ideal_reps

        assert len(two_sided_ideal_reps(hurwitz_order)) == 2
        assert len(two_sided_ideal_reps(maximal_order(q15_algebra))) == 2
