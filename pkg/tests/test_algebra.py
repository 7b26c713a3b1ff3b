import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from diffcast.algebra import (
    EvaluationError,
    ForcingTerm,
    Polynomial,
    RationalFunction,
    annihilating_recursion,
    apply_shift_operator,
    characteristic_polynomial,
    exact_rank,
    generating_function_to_recursion,
    poly_gcd,
    recursion_to_generating_function,
    simulate_recursion,
    wronskian_certificate,
)
from diffcast.core import DomainError

z = Polynomial([0, 1])
rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def rf(num, den):
    return RationalFunction(Polynomial(num), Polynomial(den))


# -- polynomials -------------------------------------------------------------

def test_polynomial_normalizes_trailing_zeros():
    assert Polynomial([1, 2, 0, 0]).degree == 1
    assert Polynomial([0, 0]).is_zero()
    assert Polynomial().degree == -1


def test_divmod_reconstructs():
    a = Polynomial([3, -1, 0, 2, 5])
    b = Polynomial([1, 0, F(1, 2)])
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.degree < b.degree


def test_gcd_is_monic_common_factor():
    common = Polynomial([-1, 1]) * Polynomial([2, 0, 1])
    a = common * Polynomial([3, 1])
    b = common * Polynomial([F(1, 3), 0, 2])
    assert poly_gcd(a, b) == common.monic()


def test_str_reads_naturally():
    assert str(characteristic_polynomial([1, 1])) == "z^2 - z - 1"
    assert str(Polynomial([0, 1])) == "z"


# -- generating functions ------------------------------------------------------

def test_constant_series_gives_z_over_z_minus_1():
    assert recursion_to_generating_function([1], [1]) == rf([0, 1], [-1, 1])


def test_geometric_doubling():
    # z(X - 1) - 2X = 0  =>  X = z / (z - 2)
    assert recursion_to_generating_function([2], [1]) == rf([0, 1], [-2, 1])


def test_fibonacci():
    # z^2 (X - 1/z) - zX - X = 0  =>  X = z / (z^2 - z - 1)
    assert recursion_to_generating_function([1, 1], [0, 1]) == rf([0, 1], [-1, -1, 1])


def test_zero_initials_reduce_to_zero_series():
    X = recursion_to_generating_function([F(1, 2), 0], [0, 0])
    assert X.numerator.is_zero() and X.denominator == Polynomial([1])
    assert generating_function_to_recursion(X) == (0, (), ())


def test_inverse_examples():
    assert generating_function_to_recursion(rf([0, 1], [-1, 1])) == (1, (1,), (1,))
    assert generating_function_to_recursion(rf([0, 1], [-1, -1, 1])) == (2, (1, 1), (0, 1))


def test_gcd_cancellation_example():
    X = rf([0, -1, 1], [-1, 0, 1])  # (z^2 - z) / (z^2 - 1)
    assert X == rf([0, 1], [1, 1])
    assert generating_function_to_recursion(X) == (1, (-1,), (1,))
    assert X.series(6) == [1, -1, 1, -1, 1, -1]


def test_improper_function_is_rejected():
    with pytest.raises(DomainError):
        generating_function_to_recursion(rf([0, 0, 1], [1, 1]))


def test_numerator_not_divisible_by_z_needs_one_more_order():
    # 1/(z-1) expands as 0, 1, 1, 1, ...; x(1) = x(0) fails, x(t+2) = x(t+1) holds from t=0
    X = rf([1], [-1, 1])
    n, a, x0 = generating_function_to_recursion(X)
    assert (n, a, x0) == (2, (1, 0), (0, 1))
    assert simulate_recursion(a, x0, 10) == X.series(10)


def test_recursion_validation():
    with pytest.raises(DomainError):
        recursion_to_generating_function([], [])
    with pytest.raises(DomainError):
        recursion_to_generating_function([1, 2], [1])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(
    lambda n: st.tuples(st.lists(rationals, min_size=n, max_size=n),
                        st.lists(rationals, min_size=n, max_size=n))))
def test_expansion_matches_simulation(case):
    a, x0 = case
    X = recursion_to_generating_function(a, x0)
    assert X.series(4 * len(a)) == simulate_recursion(a, x0, 4 * len(a))
    n, a2, x2 = generating_function_to_recursion(X)
    assert n <= len(a) + 1
    if n:
        assert simulate_recursion(a2, x2, 4 * len(a)) == X.series(4 * len(a))


@settings(max_examples=40, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=4),
       st.lists(rationals, min_size=1, max_size=4),
       st.lists(rationals, min_size=1, max_size=3))
def test_reduction_preserves_value(num, den, common):
    den = Polynomial(den)
    if den.is_zero():
        den = Polynomial([1])
    c = Polynomial(common)
    if c.is_zero():
        c = Polynomial([1])
    N, D = Polynomial(num) * c, den * c
    X = RationalFunction(N, D)
    # cross products agree before and after reduction
    assert X.numerator * D == N * X.denominator
    assert X.denominator.leading == 1


def test_derivative_matches_quotient_rule_by_hand():
    X = rf([0, 1], [-2, 1])  # z/(z-2), derivative -2/(z-2)^2
    assert X.derivative() == rf([-2], [4, -4, 1])


# -- annihilators ----------------------------------------------------------------

def test_constant_annihilator():
    assert annihilating_recursion([ForcingTerm.poly_exp(1, 0)]) == Polynomial([-1, 1])


def test_t_times_power_annihilator():
    assert annihilating_recursion([ForcingTerm.poly_exp(3, 1)]) == Polynomial([-3, 1]) ** 2


def test_sinusoid_annihilator():
    assert annihilating_recursion([ForcingTerm.sinusoid(F(1, 2))]) == Polynomial([1, -1, 1])


def test_annihilator_lcm_does_not_duplicate():
    p = annihilating_recursion([ForcingTerm.poly_exp(2, 0), ForcingTerm.poly_exp(2, 1),
                                ForcingTerm.poly_exp(1, 0)])
    assert p == Polynomial([-2, 1]) ** 2 * Polynomial([-1, 1])


def test_annihilator_needs_terms():
    with pytest.raises(DomainError):
        annihilating_recursion([])


def test_sinusoid_rejects_bad_cosine():
    with pytest.raises(ValueError):
        ForcingTerm.sinusoid(F(3, 2))


def chebyshev_t(t, c):
    return sum((-1) ** k * math.comb(t, 2 * k) * c ** (t - 2 * k) * (1 - c * c) ** k
               for k in range(t // 2 + 1))


def chebyshev_u(m, c):
    # sin((m+1)w)/sin(w) in closed form
    if m < 0:
        return F(0)
    return sum((-1) ** k * math.comb(m - k, k) * (2 * c) ** (m - 2 * k) for k in range(m // 2 + 1))


def test_chebyshev_oracle_against_floats():
    c = F(1, 3)
    w = math.acos(float(c))
    for t in range(12):
        assert math.isclose(float(chebyshev_t(t, c)), math.cos(w * t), abs_tol=1e-12)
        assert math.isclose(float(chebyshev_u(t - 1, c)) * math.sin(w), math.sin(w * t), abs_tol=1e-12)


def test_sinusoid_annihilator_in_floats_with_phase():
    # irrational cos(omega) approximated rationally: residual below 1e-12 on exact rational cosine
    c = F(4, 5)
    w = math.acos(0.8)
    p = annihilating_recursion([ForcingTerm.sinusoid(c, 1, phase=0.3)])
    seq = [t * math.sin(w * t + 0.3) for t in range(50)]
    out = apply_shift_operator(p, seq)
    assert max(abs(float(v)) for v in out) < 1e-12


# -- Wronskian certificates -------------------------------------------------------

def test_fibonacci_certificate_full():
    X = recursion_to_generating_function([1, 1], [0, 1])
    cert = wronskian_certificate(X, 2, "full", rng=0)
    assert (cert.matrix_order, cert.rank, cert.identifiable) == (5, 4, True)


def test_constant_series_overclaimed():
    cert = wronskian_certificate(rf([0, 1], [-1, 1]), 2, "full", rng=0)
    assert cert.rank < 4 and not cert.identifiable


def test_doubling_dynamics():
    cert = wronskian_certificate(rf([0, 1], [-2, 1]), 1, "dynamics", rng=0)
    assert (cert.matrix_order, cert.rank, cert.identifiable) == (2, 1, True)


def test_certificate_rank_formula_when_underclaimed():
    # rank of the full matrix is n + m for true order m and claim n (m + n <= 2n + 1)
    X = recursion_to_generating_function([1, 1, 1], [1, 2, 3])
    cert = wronskian_certificate(X, 2, "full", rng=3)
    assert cert.rank == 5 and not cert.identifiable


def test_evaluated_matrix_matches_exact_entries():
    # rank of the evaluated matrix from rational-function entries evaluated one by one
    from diffcast.algebra import DerivativeTower, wronskian_columns
    X = recursion_to_generating_function([2, -1], [1, 3])
    cols, orders = wronskian_columns(X, 2, "full")
    zs = F(7, 5)
    slow = []
    for k in orders:
        row = []
        for f in cols:
            g = f
            for _ in range(k):
                g = g.derivative()
            row.append(g(zs))
        slow.append(row)
    fast = [[DerivativeTower(f, 4).evaluate(k, zs) for f in cols] for k in orders]
    assert slow == fast
    assert exact_rank(slow) == 4


def test_pole_only_points_raise():
    class Stuck(random.Random):
        def randint(self, a, b):
            return 1  # always z* = 1, a pole of z/(z-1)

    with pytest.raises(EvaluationError, match="poles hit: 1"):
        wronskian_certificate(rf([0, 1], [-1, 1]), 1, rng=Stuck(), max_draws=5)


def test_certificate_order_limits():
    X = rf([0, 1], [-1, 1])
    with pytest.raises(DomainError):
        wronskian_certificate(X, 0)
    with pytest.raises(DomainError):
        wronskian_certificate(X, 7)


def test_exact_rank_small_cases():
    assert exact_rank([[F(1), F(2)], [F(2), F(4)]]) == 1
    assert exact_rank([[F(0), F(0)], [F(0), F(0)]]) == 0
    assert exact_rank([[F(0), F(1)], [F(1), F(0)]]) == 2
