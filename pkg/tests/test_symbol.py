import warnings

import numpy as np
import pytest

from conftest import data_path
from wfa_aak.aak import build_error_wfa, partition, solve_auxiliary
from wfa_aak.errors import NearPole, NearZeroDenominator
from wfa_aak.generators import random_minimal_sva, stretch
from wfa_aak.symbol import (
    circle_grid,
    error_ratio,
    error_symbol,
    fourier_coefficient,
    pole_report,
    schmidt_functions,
    symbol_eval,
    symbol_values,
    unimodularity_check,
)
from wfa_aak.wfa import Wfa, load_wfa, minimize, series, to_sva


def test_symbol_example1_values(ex1):
    # phi(z) = (3/4) z / (z^2 - 1/4)
    assert symbol_eval(ex1, 2.0) == pytest.approx(0.4, abs=1e-14)
    assert symbol_eval(ex1, 1.0) == pytest.approx(1.0, abs=1e-14)
    z = 0.3 + 0.9j
    assert symbol_eval(ex1, z) == pytest.approx(0.75 * z / (z * z - 0.25), abs=1e-14)


def test_symbol_pole(ex1):
    with pytest.raises(NearPole):
        symbol_eval(ex1, 0.5)


def test_symbol_values_matches_pointwise(three_state):
    _, zs = circle_grid(37)
    zs = np.concatenate([zs, 1.7 * zs, [0.1 + 0.2j]])
    ref = np.array([symbol_eval(three_state, z) for z in zs])
    np.testing.assert_allclose(symbol_values(three_state, zs), ref, rtol=1e-12, atol=1e-14)


def test_fourier_coefficients(ex1):
    assert fourier_coefficient(ex1, -1) == pytest.approx(0.75)
    assert fourier_coefficient(ex1, -2) == 0.0
    assert fourier_coefficient(ex1, -3) == pytest.approx(0.1875)
    with pytest.raises(ValueError):
        fourier_coefficient(ex1, 0)


def test_trapezoid_recovers_coefficients(three_state):
    # f(j) = (1/L) sum_l phi(z_l) z_l^(j+1), exact up to aliasing rho^L
    L = 256
    _, zs = circle_grid(L)
    phi = symbol_values(three_state, zs)
    f = [np.mean(phi * zs ** (j + 1)).real for j in range(10)]
    np.testing.assert_allclose(f, series(three_state, 10), atol=1e-14)


def test_schmidt_pair_example1(ex1):
    pair = schmidt_functions(to_sva(ex1), 1)
    h = np.sqrt(3) / 2
    s = np.sqrt(0.2)
    np.testing.assert_allclose(pair.xi_coefficients(4), np.array([0, h / 2, 0, h / 8]) / s, atol=1e-15)
    np.testing.assert_allclose(pair.eta_coefficients(4), np.array([0, h / 2, 0, h / 8]) / s, atol=1e-15)


def test_schmidt_vectors_are_singular_vectors(three_state):
    # H xi = sigma eta on a large truncation
    S = to_sva(three_state)
    pair = schmidt_functions(S, 1)
    J = 200
    f = series(S.wfa, 2 * J)
    Hm = np.array([[f[i + j] for j in range(J)] for i in range(J)])
    xi, eta = pair.xi_coefficients(J), pair.eta_coefficients(J)
    np.testing.assert_allclose(Hm @ eta, pair.sigma * xi, atol=1e-12)
    assert xi @ xi == pytest.approx(1.0, rel=1e-10)


def test_error_ratio_example1(ex1):
    S = to_sva(ex1)
    # sigma (1 - z^2/4) / (z (z^2 - 1/4))
    assert error_ratio(S, 1, 1.0) == pytest.approx(0.2, abs=1e-14)
    assert error_ratio(S, 1, 1j) == pytest.approx(0.2j, abs=1e-14)


def test_error_ratio_zero_denominator(ex1):
    with pytest.raises(NearZeroDenominator):
        error_ratio(to_sva(ex1), 1, 0.0)


def test_error_ratio_unimodular_random(rng):
    S = random_minimal_sva(rng, 5)
    for k in range(5):
        res = unimodularity_check(S, k, 500, method="ratio")
        assert res.deviation < 1e-10


def test_error_ratio_independent_of_group_vector(three_state):
    S = to_sva(minimize(stretch(three_state, 3)))
    z = np.exp(0.7j)
    e = np.eye(S.n)
    r1 = error_ratio(S, 1, z, e[1])
    r2 = error_ratio(S, 1, z, e[2])
    r3 = error_ratio(S, 1, z, e[1] + 0.3 * e[2])
    assert r2 == pytest.approx(r1, rel=1e-12)
    assert r3 == pytest.approx(r1, rel=1e-12)


def test_error_symbol_example1(ex1):
    S = to_sva(ex1)
    Pb = partition(S, 1)
    E = build_error_wfa(Pb, solve_auxiliary(Pb))
    _, zs = circle_grid(64)
    for z in zs[1::7]:
        assert abs(error_symbol(E, z)) == pytest.approx(0.2, rel=1e-13)


def test_unimodularity_symbol_random(rng):
    S = random_minimal_sva(rng, 4)
    for k in range(1, 4):
        assert unimodularity_check(S, k).deviation < 1e-8


def test_unimodularity_detects_perturbation(ex1):
    S = to_sva(ex1)
    Pb = partition(S, 1)
    aux = solve_auxiliary(Pb)
    bad = type(aux)(aux.A_hat, aux.alpha_hat + 1e-3, aux.beta_hat, aux.branch, 0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = unimodularity_check(S, 1, error=build_error_wfa(Pb, bad))
    assert res.deviation > 1e-4
    assert res.samples == 1000


def test_pole_report_counts():
    W = load_wfa(data_path("mixed.json"))
    poles = pole_report(W)
    assert [p.inside_disc for p in poles] == [True, False]
    assert poles[0].modulus == pytest.approx(0.5)
    assert pole_report(Wfa([], np.zeros((0, 0)), [])) == []


def test_pole_count_equals_rank_for_minimal(rng):
    S = random_minimal_sva(rng, 5)
    assert sum(p.inside_disc for p in pole_report(S.wfa)) == 5
