from fractions import Fraction

import pytest

from halfint.bounds import (
    Vanishing,
    gamma0_index,
    kohnen_bound,
    prime_divisors,
    sturm_bound_halfint,
    vanishing_test,
)
from halfint.errors import BadLevel, BadWeight
from halfint.qseries import QExpansion

from oracles import p1_free_count, p1_orbit_count


@pytest.mark.parametrize("N", range(1, 41))
def test_index_matches_coset_orbits(N):
    assert gamma0_index(N) == p1_orbit_count(N)


def test_index_multiplicative():
    assert gamma0_index(364) == gamma0_index(4) * gamma0_index(7) * gamma0_index(13)


def test_prime_divisors():
    assert prime_divisors(1456) == [2, 7, 13]
    assert prime_divisors(1) == []


@pytest.mark.parametrize("N,expected", [(1, 1), (8, 12), (52, 84), (208, 336), (364, 672),
                                         (1456, 2688)])
def test_index_table(N, expected):
    assert gamma0_index(N) == expected == p1_free_count(N)


@pytest.mark.parametrize("k,N,B,floor", [(7, 8, Fraction(7, 2), 3), (3, 364, Fraction(84), 84),
                                          (5, 52, Fraction(35, 2), 17)])
def test_sturm(k, N, B, floor):
    b = sturm_bound_halfint(k, N)
    assert b.bound == B and b.floor == floor
    assert b.covers(floor) and not b.covers(floor + 1)


@pytest.mark.parametrize("k,N,B", [(3, 364, 336), (5, 52, 70), (3, 4, 3)])
def test_kohnen(k, N, B):
    b = kohnen_bound(k, N)
    assert b.bound == B and b.kohnen
    assert b.index == gamma0_index(4 * N)


@pytest.mark.parametrize("k,N,err", [(4, 8, BadWeight), (-1, 8, BadWeight), (3, 6, BadLevel),
                                      (3, 0, BadLevel)])
def test_bad_parameters(k, N, err):
    with pytest.raises(err):
        sturm_bound_halfint(k, N)


def test_describe_has_provenance():
    text = sturm_bound_halfint(5, 52).describe()
    assert "5*84/24" in text and "35/2" in text and "floor 17" in text


class TestVanishing:
    def test_zero(self):
        r = vanishing_test(QExpansion.from_list([0] * 10), 7, 8)
        assert r.verdict is Vanishing.CERTIFIED_ZERO
        assert "conditional" in str(r)

    def test_nonzero(self, fx):
        r = vanishing_test(fx["level8_f"])
        assert r.verdict is Vanishing.NONZERO_AT and r.n == 1

    def test_insufficient(self, fx):
        r = vanishing_test(fx["ex364_f1"], 3, 364)
        assert r.verdict is Vanishing.INSUFFICIENT_PRECISION and r.n == 85

    def test_exact_boundary(self):
        # floor(B) = 3 needs a(0..3), i.e. prec 4
        assert vanishing_test(QExpansion.zero(3), 7, 8).verdict is Vanishing.INSUFFICIENT_PRECISION
        assert vanishing_test(QExpansion.zero(4), 7, 8).verdict is Vanishing.CERTIFIED_ZERO

    def test_needs_parameters(self):
        with pytest.raises(ValueError):
            vanishing_test(QExpansion.zero(4))
