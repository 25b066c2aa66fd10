import pytest
from fractions import Fraction


class TestQuaternionArithmetic:
    """Test multiplication, conjugation, norm and trace in (-a,-b / K)"""

    def test_relations(self, hurwitz_algebra):
        """i^2 = -a, j^2 = -b, ij = -ji"""
        Q = hurwitz_algebra
        i, j = Q.elem(0, 1), Q.elem(0, 0, 1)

        assert i * i == Q.elem(-1)
        assert j * j == Q.elem(-1)
        assert i * j == -(j * i)
        assert i * j == Q.elem(0, 0, 0, 1)

    def test_relations_nontrivial_b(self, q11_algebra):
        Q = q11_algebra
        j = Q.elem(0, 0, 1)

        assert j * j == Q.elem(-11)
        assert j.reduced_norm() == Q.field.elem(11)

    def test_norm_is_multiplicative(self, q15_algebra):
        Q = q15_algebra
        K = Q.field
        alpha = Q.elem(K.elem(1, 1), 2, K.elem(0, -1), 3)
        beta = Q.elem(2, K.elem(1, 2), 0, K.elem(-1, 1))

        assert (alpha * beta).reduced_norm() == alpha.reduced_norm() * beta.reduced_norm()

    def test_norm_and_trace(self, hurwitz_algebra):
        alpha = hurwitz_algebra.elem(1, 1)

        assert alpha.reduced_norm() == hurwitz_algebra.field.elem(2)
        assert alpha.reduced_trace() == hurwitz_algebra.field.elem(2)
        assert alpha * alpha.conj() == hurwitz_algebra.elem(2)

    def test_inverse(self, hurwitz_algebra):
        Q = hurwitz_algebra
        alpha = Q.elem(1, 2, 0, 1)

        assert alpha * alpha.inverse() == Q.one
        assert (Q.elem(3) / alpha) * alpha == Q.elem(3)

    def test_mul_vectors_matches_elements(self, q15_algebra):
        """The structure constants reproduce the element product"""
        Q = q15_algebra
        K = Q.field
        alpha = Q.elem(K.elem(1, 1), 2, K.elem(0, -1), 3)
        beta = Q.elem(2, K.elem(1, 2), 0, K.elem(-1, 1))

        product = Q.mul_vectors(alpha.vector(), beta.vector())

        assert Q.element(product) == alpha * beta

    def test_scalar_and_conj_vectors(self, q15_algebra):
        Q = q15_algebra
        K = Q.field
        alpha = Q.elem(K.elem(1, 1), 2, K.elem(0, -1), 3)
        c = K.elem(4, 1)

        assert Q.element(Q.scalar_vector(c, alpha.vector())) == alpha * Q.elem(c)
        assert Q.element(Q.conj_vector(alpha.vector())) == alpha.conj()
        assert Q.norm_vector(alpha.vector()) == alpha.reduced_norm()

    def test_trace_form_identity_over_rationals(self, hurwitz_algebra):
        form = hurwitz_algebra.trace_form(hurwitz_algebra.field.one)

        assert form == tuple(tuple(Fraction(int(r == s)) for s in range(4)) for r in range(4))


class TestMakeAlgebra:
    """Test construction and validation of totally definite algebras"""

    def test_rejects_non_totally_positive(self, rationals, q15_field):
        from app.quat_algebra import make_algebra

        with pytest.raises(ValueError, match="totally positive"):
            make_algebra(rationals, -1, 1)
        with pytest.raises(ValueError, match="totally positive"):
            make_algebra(q15_field, q15_field.omega, 1)

    def test_rescales_to_integral(self, rationals):
        from app.quat_algebra import make_algebra

        Q = make_algebra(rationals, "1/2", 3)

        assert Q.a == rationals.elem(2)
        assert Q.b == rationals.elem(3)

    def test_parses_strings(self, q15_field):
        from app.quat_algebra import make_algebra

        Q = make_algebra(q15_field, "4+w", "1")

        assert Q.a == q15_field.elem(4, 1)
        assert Q.dim == 8


class TestRamification:
    """Test the finite ramification set"""

    def test_hurwitz_ramified_at_two(self, hurwitz_algebra):
        assert [P.norm for P in hurwitz_algebra.ramified_primes] == [2]
        assert hurwitz_algebra.s == 1

    def test_ramified_at_eleven(self, q11_algebra):
        assert [P.norm for P in q11_algebra.ramified_primes] == [11]

    def test_unramified_over_q15(self, q15_algebra):
        assert q15_algebra.ramified_primes == ()
        assert q15_algebra.s == 0
