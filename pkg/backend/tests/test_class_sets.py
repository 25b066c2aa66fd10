import pytest
from fractions import Fraction
from itertools import islice


class TestMasses:
    """Test the Eichler mass and its split over narrow classes"""

    def test_eichler_mass_values(self, hurwitz_algebra, q11_algebra, q15_algebra):
        from app.class_sets import eichler_mass

        assert eichler_mass(hurwitz_algebra) == Fraction(1, 12)
        assert eichler_mass(q11_algebra) == Fraction(5, 6)
        assert eichler_mass(q15_algebra) == 2

    def test_mass_per_narrow_class(self, hurwitz_algebra, q15_algebra):
        from app.class_sets import mass_per_narrow_class
        from app.field_arith import unit_ideal

        assert mass_per_narrow_class(hurwitz_algebra, unit_ideal(hurwitz_algebra.field)) == Fraction(1, 12)
        assert mass_per_narrow_class(q15_algebra, unit_ideal(q15_algebra.field)) == Fraction(1, 2)

    def test_mass_mismatch_raises(self, hurwitz_algebra, hurwitz_order):
        from app.class_sets import ClassData, mass_per_narrow_class
        from app.errors import ConsistencyError
        from app.field_arith import unit_ideal

        broken = ClassData(hurwitz_algebra, hurwitz_order, [hurwitz_order], [6])

        with pytest.raises(ConsistencyError):
            mass_per_narrow_class(hurwitz_algebra, unit_ideal(hurwitz_algebra.field), broken)


class TestNormClasses:
    def test_principal_square_root(self, rationals, q15_field):
        from app.class_sets import principal_square_root, same_norm_class

        root = principal_square_root(rationals.elem(4))

        assert root is not None and abs(root.coords[0]) == 2
        assert principal_square_root(rationals.elem(2)) is None
        assert principal_square_root(q15_field.elem(4, 1)) is not None
        assert same_norm_class(q15_field.elem(3), q15_field.elem(12))
        assert not same_norm_class(q15_field.one, q15_field.elem(3))

    def test_primes_by_norm(self, q15_field):
        from app.class_sets import primes_by_norm

        norms = [P.norm for P in islice(primes_by_norm(q15_field), 6)]

        assert norms == [2, 3, 5, 7, 7, 11]


class TestRightIdealClasses:
    """Test the neighbour walk that collects right ideal classes"""

    def test_hurwitz_class_number_one(self, hurwitz_order):
        from app.class_sets import right_ideal_classes

        data = right_ideal_classes(hurwitz_order)

        assert data.h == 1
        assert data.right_ideal_reps[0] == hurwitz_order
        assert data.left_unit_indices == [12]

    def test_q11_two_classes(self, q11_order):
        from app.class_sets import right_ideal_classes, eichler_mass
        from app.enumeration import is_left_principal

        data = right_ideal_classes(q11_order)

        assert data.h == 2
        assert sorted(data.left_unit_indices) == [2, 3]
        assert sum(Fraction(1, k) for k in data.left_unit_indices) == eichler_mass(q11_order.algebra)
        assert is_left_principal(data.right_ideal_reps[1]) is None

    def test_q11_types(self, q11_order):
        from app.class_sets import maximal_order_types, right_ideal_classes

        data = maximal_order_types(right_ideal_classes(q11_order))

        assert data.t == 2
        assert sorted(data.type_index) == [0, 1]
        keys = [O.key for O in data.type_reps]
        assert keys == sorted(keys)


class TestConjugacy:
    """Test fingerprints and conjugacy of maximal orders"""

    def test_fingerprint_invariant(self, hurwitz_algebra, hurwitz_order):
        from app.class_sets import order_fingerprint

        beta = hurwitz_algebra.elem(1, 2)
        conjugate = hurwitz_order.left_scale(beta).right_scale(beta.inverse())

        assert order_fingerprint(conjugate) == order_fingerprint(hurwitz_order)

    def test_conjugate_orders(self, hurwitz_algebra, hurwitz_order):
        from app.class_sets import are_conjugate

        beta = hurwitz_algebra.elem(1, 2)
        conjugate = hurwitz_order.left_scale(beta).right_scale(beta.inverse())

        assert are_conjugate(hurwitz_order, conjugate)

    def test_non_conjugate_orders(self, q11_order):
        from app.class_sets import are_conjugate, maximal_order_types, right_ideal_classes

        data = maximal_order_types(right_ideal_classes(q11_order))

        assert not are_conjugate(data.type_reps[0], data.type_reps[1])


class TestNormalizers:
    """Test normalizer cosets and two-sided class numbers"""

    def test_hurwitz_normalizer(self, hurwitz_order):
        from app.class_sets import normalizer_data

        nd = normalizer_data(hurwitz_order)

        assert nd.f_i == 1
        assert len(nd.coset_reps) == 2
        assert sorted(int(x.coords[0]) for x in nd.Pi) == [1, 2]

    def test_two_sided_class_number(self, hurwitz_order):
        from app.class_sets import two_sided_class_number

        assert two_sided_class_number(hurwitz_order) == 1

    def test_connecting_count(self, hurwitz_algebra, hurwitz_order):
        from app.class_sets import connecting_class_count, expected_connecting_count, normalizer_data

        nd = normalizer_data(hurwitz_order)

        assert connecting_class_count(hurwitz_order, hurwitz_order) == 1
        assert expected_connecting_count(hurwitz_algebra, nd, nd) == 1

    def test_scaled_power_of_two_is_exact(self):
        from app.class_sets import scaled_power_of_two
        from app.errors import ConsistencyError

        assert scaled_power_of_two(2, -1) == 1
        assert type(scaled_power_of_two(2, -1)) is int
        assert scaled_power_of_two(3, 2) == 12
        with pytest.raises(ConsistencyError, match="not an integer"):
            scaled_power_of_two(1, -1)

    @pytest.mark.slow
    def test_q15_connecting_count_is_integral(self, q15_algebra, q15_data):
        from app.class_sets import expected_connecting_count

        nd = q15_data.normalizers
        count = expected_connecting_count(q15_algebra, nd[0], nd[1])

        assert type(count) is int
        assert count == 1

    def test_common_norm_classes(self, hurwitz_order):
        from app.class_sets import common_norm_classes, normalizer_data

        nd = normalizer_data(hurwitz_order)

        assert common_norm_classes(nd, nd) == nd.f_i
