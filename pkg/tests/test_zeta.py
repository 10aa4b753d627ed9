from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy

from bloch_k2.apnum import PrecisionContext
from bloch_k2.nfield import create_field, cyclotomic_field, real_cyclotomic_field
from bloch_k2.zeta import (MIN_TERMS, TermBudgetError, _count_roots, _local_coefficients,
                           cyclotomic_zeta2, dedekind_zeta2, euler_factor_degrees,
                           real_cyclotomic_zeta2, transport_to_minus1, zeta_minus1)

X = sympy.Symbol("x")
SMALL_M = 3000


def test_euler_factor_degrees(fields, cyclo5):
    assert euler_factor_degrees(fields["cubic_d83"], 2) == [1, 2]
    # 11 = 1 mod 5 splits completely
    assert euler_factor_degrees(cyclo5, 11) == [1, 1, 1, 1]
    # 2 has order 4 mod 5, so it is inert
    assert euler_factor_degrees(cyclo5, 2) == [4]
    # 5 is totally ramified: one prime of degree 1
    assert euler_factor_degrees(cyclo5, 5) == [1]
    with pytest.raises(ValueError):
        euler_factor_degrees(cyclo5, 4)


def test_local_coefficients():
    # (1 - T)^-2 = 1 + 2T + 3T^2 + ...
    assert _local_coefficients([1, 1], 4) == [1, 2, 3, 4, 5]
    assert _local_coefficients([2], 5) == [1, 0, 1, 0, 1, 0]


@pytest.mark.parametrize("poly", [[2, 1, 1, 1], [1, 1, -2, 0, 1], [1, 1, 1, 1, 1], [2, -1, 0, 1]])
def test_count_roots_against_sympy(poly):
    f = np.array(poly, dtype=np.int64)
    for p in sympy.primerange(3, 400):
        if sympy.Poly(list(reversed(poly)), X).discriminant() % p == 0:
            continue
        roots = {int(r) % p for r in range(p)
                 if sum(c * pow(r, i, p) for i, c in enumerate(poly)) % p == 0}
        assert _count_roots(f, p) == len(roots)


def _brute_partial_sum(F, M):
    """sum_{m <= M} a_m / m^2 from splitting types of every prime, in pure Python."""
    a = [0] * (M + 1)
    a[1] = 1
    for p in sympy.primerange(2, M + 1):
        degs = euler_factor_degrees(F, p) if F.degree > 1 else [1]
        kmax = 0
        while p ** (kmax + 1) <= M:
            kmax += 1
        local = _local_coefficients(degs, kmax)
        new = a[:]
        for m in range(1, M + 1):
            if a[m] == 0 or m % p == 0:
                continue
            pk = p
            for k in range(1, kmax + 1):
                if m * pk > M:
                    break
                new[m * pk] += a[m] * local[k]
                pk *= p
        a = new
    return sum(Fraction(a[m], m * m) for m in range(1, M + 1))


@pytest.mark.parametrize("name", ["cubic_d83", "cubic_d104", "quartic_d283a"])
def test_sieve_matches_brute_force(fields, name):
    F = fields[name]
    res = dedekind_zeta2(F, SMALL_M)
    ref = _brute_partial_sum(F, SMALL_M)
    assert abs(float(res.value) - float(ref)) < 1e-12


def test_rational_field_is_riemann_zeta(ctx):
    Q = create_field([0, 1])
    res = dedekind_zeta2(Q, 100_000, ctx)
    with ctx.workdps():
        err = abs(res.value - mpmath.pi ** 2 / 6)
    assert err <= res.tail_bound
    assert res.tail_bound < 1e-4


def test_refinement_shrinks_bound(fields):
    F = fields["cubic_d59"]
    coarse = dedekind_zeta2(F, 10_000)
    fine = dedekind_zeta2(F, 200_000)
    assert fine.tail_bound < coarse.tail_bound
    # partial sums increase and stay below the upper bound
    assert coarse.value <= fine.value <= coarse.value + coarse.tail_bound


@pytest.mark.parametrize("p", [3, 5, 7])
def test_cyclotomic_character_route_matches_sieve(p, ctx):
    exact = cyclotomic_zeta2(p, ctx)
    sieve = dedekind_zeta2(cyclotomic_field(p), 200_000, ctx)
    assert abs(exact.value - sieve.value) <= sieve.tail_bound + exact.tail_bound
    assert exact.tail_bound < mpmath.mpf(10) ** -35


def test_even_product_is_real_subfield(ctx):
    exact = real_cyclotomic_zeta2(5, ctx)
    sieve = dedekind_zeta2(real_cyclotomic_field(5), 200_000, ctx)
    assert abs(exact.value - sieve.value) <= sieve.tail_bound
    # zeta_{Q(sqrt5)}(2) = 2 pi^4 / (75 sqrt 5)
    with ctx.workdps():
        assert abs(exact.value - 2 * mpmath.pi ** 4 / (75 * mpmath.sqrt(5))) < mpmath.mpf(10) ** -35


def test_cyclotomic_parameter_validation():
    with pytest.raises(ValueError):
        cyclotomic_zeta2(4)
    with pytest.raises(ValueError):
        cyclotomic_zeta2(5, parity="odd-ish")


def test_term_limits(fields):
    with pytest.raises(ValueError):
        dedekind_zeta2(fields["cubic_d83"], MIN_TERMS - 1)
    with pytest.raises(TermBudgetError):
        dedekind_zeta2(fields["cubic_d83"], 10 ** 12)


def test_transport_signatures(fields, cyclo5):
    t = transport_to_minus1(fields["cubic_d83"])
    assert (t.two_exp, t.pi_exp, t.order_of_vanishing) == (4, 5, 1)
    t = transport_to_minus1(fields["quartic_d283a"])
    assert (t.two_exp, t.pi_exp, t.order_of_vanishing) == (5, 7, 1)
    t = transport_to_minus1(cyclo5)
    assert (t.two_exp, t.pi_exp, t.order_of_vanishing) == (6, 6, 2)
    assert t.disc_exp == Fraction(3, 2)


def test_transport_on_real_quadratic(ctx):
    # zeta_{Q(sqrt5)}(-1) = 1/30
    F = real_cyclotomic_field(5)
    z2 = real_cyclotomic_zeta2(5, ctx)
    val, err = zeta_minus1(F, z2, ctx)
    with ctx.workdps():
        assert abs(val - mpmath.mpf(1) / 30) < mpmath.mpf(10) ** -35
    assert err < mpmath.mpf(10) ** -35


def test_transport_on_rationals(ctx):
    # |zeta(-1)| = 1/12
    Q = create_field([0, 1])
    t = transport_to_minus1(Q)
    with ctx.workdps():
        val = t.to_minus1(mpmath.pi ** 2 / 6, 1, ctx)
        assert abs(val - mpmath.mpf(1) / 12) < mpmath.mpf(10) ** -35


def test_result_json_fields(fields):
    out = dedekind_zeta2(fields["cubic_d83"], 5000).to_json(12)
    assert set(out) == {"value", "tail_bound", "terms_used", "method"}
    assert out["terms_used"] == 5000 and out["method"] == "dirichlet_sieve"
    assert PrecisionContext().digits == 38
