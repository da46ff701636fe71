from __future__ import annotations

import pytest

from tropskel.bounds import (
    D_bound,
    bound_report,
    castelnuovo,
    check_bound_consistency,
    ell_bound,
    plane_genus,
    t_of_g,
)


def test_t_of_g_examples():
    assert t_of_g(0) == 1
    assert t_of_g(1) == 3
    assert t_of_g(3) == 8
    with pytest.raises(ValueError):
        t_of_g(-1)


def test_t_of_g_monotone():
    vals = [t_of_g(g) for g in range(200)]
    assert vals == sorted(vals)


def test_D_bound_examples():
    assert D_bound(3, 2, planar=True) == 1
    assert D_bound(4, 2, planar=True) == 2
    assert D_bound(5, 2, planar=True) == 4
    # N <= 2 uses the planar branch even without the flag
    assert D_bound(5, 2) == 4
    assert D_bound(6, 3) == 4
    assert D_bound(3, 3) == 1
    with pytest.raises(ValueError):
        D_bound(0, 2)


def test_castelnuovo_examples():
    assert castelnuovo(4, 3) == (1, 1, 1)
    assert castelnuovo(6, 3) == (2, 1, 4)
    for n in range(3, 30):
        assert castelnuovo(n, n)[2] == 0
    with pytest.raises(ValueError):
        castelnuovo(3, 4)


def test_castelnuovo_split_invariants():
    for d in range(3, 60):
        for n in range(3, d + 1):
            m0, eps0, pi = castelnuovo(d, n)
            assert d - 1 == m0 * (n - 1) + eps0
            assert 0 <= eps0 <= n - 2 and m0 >= 1
            assert pi >= 0
            assert 2 * pi == m0 * (m0 - 1) * (n - 1) + 2 * m0 * eps0


def test_plane_curves_are_castelnuovo_extremal_in_the_plane():
    # the plane-curve genus agrees with the split formula read with N = 2
    for d in range(3, 40):
        m0, eps0 = d - 1, 0
        assert (m0 + 1) * (eps0 + d - 1) // 2 - (d - 1) == plane_genus(d)


def test_ell_bound_examples():
    assert ell_bound(1, 3, 2) == 1
    assert ell_bound(3, 4, 2) == 2
    assert ell_bound(0, 5, 3) == 3


def test_consistency_examples():
    assert check_bound_consistency(4, 3)
    assert check_bound_consistency(6, 3)
    with pytest.raises(ValueError):
        check_bound_consistency(3, 4)


def test_consistency_sweep():
    assert all(check_bound_consistency(d, n) for d in range(3, 51) for n in range(3, d + 1))


def test_planar_sweep():
    assert all(D_bound(d, 2, True) >= ell_bound(plane_genus(d), d, 2) for d in range(3, 51))


def test_bound_report():
    rep = bound_report(d=6, N=3)
    assert (rep.g, rep.t_g, rep.D_bound, rep.ell_bound, rep.m0, rep.eps0, rep.pi) == (4, 11, 4, 4, 2, 1, 4)
    assert rep.consistent is True
    assert bound_report(g=10).t_g == 29
    rep = bound_report(d=4, N=2, planar=True)
    assert rep.g == 3 and rep.D_bound == 2 and rep.pi is None
