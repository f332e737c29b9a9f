import pytest
from hypothesis import given, strategies as st

from residual_calc.errors import ParityError
from residual_calc.nodal import (
    CoeffSeries, k3_type2_vanishing, virtual_count_report, yau_zaslow_series,
)


def product_oracle(c2, m):
    """Multiply out prod_{i=1..m} (1 - q^i)^(-c2) factor by factor, truncated at q^m."""
    coeffs = [1] + [0] * m
    for i in range(1, m + 1):
        for _ in range(c2):
            # divide by (1 - q^i): a_k += a_{k-i}
            for k in range(i, m + 1):
                coeffs[k] += coeffs[k - i]
    return coeffs


def partitions_pentagonal(m):
    p = [1] + [0] * m
    for n in range(1, m + 1):
        k, total = 1, 0
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > n:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[n - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p[n] = total
    return p


def test_k3_spot_values():
    s = yau_zaslow_series(24, 5)
    assert s.coeffs[:4] == (1, 24, 324, 3200)
    assert s.coeffs == tuple(product_oracle(24, 5))


def test_partitions():
    assert yau_zaslow_series(1, 5).coeffs == (1, 1, 2, 3, 5, 7)
    assert list(yau_zaslow_series(1, 60).coeffs) == partitions_pentagonal(60)


@given(st.integers(1, 30), st.integers(1, 30), st.integers(0, 12))
def test_multiplicative(a, b, m):
    sa, sb, sab = (yau_zaslow_series(c, m).coeffs for c in (a, b, a + b))
    prod = [sum(sa[i] * sb[k - i] for i in range(k + 1)) for k in range(m + 1)]
    assert list(sab) == prod


@given(st.integers(1, 500))
def test_first_coefficient(c2):
    assert yau_zaslow_series(c2, 1)[1] == c2


def test_series_errors_and_text():
    with pytest.raises(ValueError):
        yau_zaslow_series(0, 3)
    with pytest.raises(ValueError):
        yau_zaslow_series(24, -1)
    with pytest.raises(ValueError):
        CoeffSeries((2, 1))
    assert yau_zaslow_series(24, 2).to_text() == "0 1\n1 24\n2 324\n"
    assert yau_zaslow_series(24, 7).delta_max == 7


def test_k3_vanishing():
    assert k3_type2_vanishing(1, True, 1)
    assert not k3_type2_vanishing(0, True, 1)
    assert not k3_type2_vanishing(1, False, 1)
    with pytest.raises(ValueError):
        k3_type2_vanishing(1, True, 0)


@given(st.integers(0, 3), st.booleans(), st.integers(1, 20))
def test_k3_vanishing_monotone(pg, triv, p):
    if k3_type2_vanishing(pg, triv, 1):
        assert k3_type2_vanishing(pg, triv, p)


@pytest.mark.parametrize("L_sq, expected", [(-2, (0, 1)), (0, (1, 24)), (4, (3, 3200))])
def test_virtual_count(L_sq, expected):
    assert virtual_count_report(L_sq, 24) == expected


def test_virtual_count_parity():
    with pytest.raises(ParityError):
        virtual_count_report(3, 24)
