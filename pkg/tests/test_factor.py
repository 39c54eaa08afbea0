import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from trigsos.arith import Gaussian
from trigsos.errors import PivotNonpositive
from trigsos.factor import Indefinite, LdltFactor, cholesky_approx, ldlt_exact
from trigsos.gram import HermitianGram
from trigsos.trigpoly import ComplexPoly, mul_star


def _gram_mul(A):
    """A* A over Gaussian rationals."""
    n = len(A)
    m = len(A[0])
    return [[sum((A[k][i].conjugate() * A[k][j] for k in range(n)), Gaussian(0)) for j in range(m)] for i in range(m)]


def _rand_matrix(rng, rows, cols, height=4):
    return [[Gaussian(Fraction(rng.randint(-height, height), rng.choice([1, 2, 3])), rng.randint(-height, height))
             for _ in range(cols)] for _ in range(rows)]


class TestLdlt:
    def test_example(self):
        fac = ldlt_exact([[4, 2], [2, 2]])
        assert fac.D == (4, 1)
        assert fac.L[1][0] == Gaussian(Fraction(1, 2))
        assert fac.perm == (0, 1)

    def test_indefinite(self):
        assert isinstance(ldlt_exact([[1, 2], [2, 1]]), Indefinite)
        assert not ldlt_exact([[-1]])

    def test_rank_one(self):
        fac = ldlt_exact([[1, Gaussian(0, 1)], [Gaussian(0, -1), 1]])
        assert isinstance(fac, LdltFactor)
        assert fac.D == (1, 0)

    def test_zero_pivot_nonzero_row(self):
        assert isinstance(ldlt_exact([[0, 1], [1, 0]]), Indefinite)

    def test_non_hermitian(self):
        with pytest.raises(ValueError):
            ldlt_exact([[1, 2], [3, 1]])

    def test_empty(self):
        assert ldlt_exact([]).D == ()

    @given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10**6))
    def test_reconstruction(self, n, rank, seed):
        rng = random.Random(seed)
        Q = _gram_mul(_rand_matrix(rng, min(rank, n), n))
        fac = ldlt_exact(Q)
        assert isinstance(fac, LdltFactor)
        assert fac.reconstruct() == Q
        assert all(x >= 0 for x in fac.D)

    @given(st.integers(1, 6), st.integers(0, 10**6), st.fractions(min_value=Fraction(1, 1000), max_value=10))
    def test_shift_positive(self, n, seed, t):
        rng = random.Random(seed)
        Q = _gram_mul(_rand_matrix(rng, rng.randint(1, n), n))
        shifted = HermitianGram.from_full(Q).shift(-t)
        assert ldlt_exact(shifted).all_positive()


class TestCholesky:
    def test_identity(self):
        s = cholesky_approx([[1, 0], [0, 1]], 1, 8)
        assert s == [ComplexPoly([1]), ComplexPoly([0, 1])]

    def test_example(self):
        s = cholesky_approx([[4, 2], [2, 2]], Fraction(1, 2), 30)
        assert s == [ComplexPoly([2, 1]), ComplexPoly([0, 1])]

    def test_sqrt2(self):
        (s0,) = cholesky_approx([[2]], 1, 8)
        c = s0.coeffs[0].re
        assert c.denominator <= 256 and 0 <= 2 ** 0.5 - float(c) <= 2 ** -8

    def test_pivot_failure(self):
        with pytest.raises(PivotNonpositive):
            cholesky_approx([[1, 2], [2, 1]], Fraction(1, 2), 10)
        with pytest.raises(PivotNonpositive):
            cholesky_approx([[1]], 0, 10)

    @pytest.mark.parametrize("seed", range(10))
    def test_error_bound(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 6)
        A = _rand_matrix(rng, n, n)
        Q = HermitianGram.from_full(_gram_mul(A)).shift(-1)
        delta_c = 30
        squares = cholesky_approx(Q, 1, delta_c)
        total = mul_star(squares[0])
        for s in squares[1:]:
            total = total + mul_star(s)
        d = n - 1
        eps = Fraction(1, 1 << delta_c)
        qmax = max(Q[i, i].re for i in range(n))
        bound = (d + 2) ** 2 * eps * qmax / (1 - (d + 2) * eps)
        diff = total - Q.to_trigpoly()
        for k in range(n):
            c = diff.coeff(k)
            assert abs(c.re) <= bound and abs(c.im) <= bound
