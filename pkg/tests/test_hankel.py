import csv

import numpy as np
import pytest
import scipy.linalg

from conftest import THREE_STATE_SINGULAR
from wfa_aak.aak import aak_reduce
from wfa_aak.errors import InputError, SpectralRadiusTooLarge, TruncationWarning
from wfa_aak.generators import random_minimal_sva
from wfa_aak.hankel import (
    AUTO_CAP,
    auto_hankel_size,
    polynomial_method,
    spectral_error,
    spectral_error_details,
    sva_truncation_baseline,
    svd_truncation_baseline,
    tail_bound,
    truncated_hankel,
    write_csv,
)
from wfa_aak.wfa import Wfa, series, to_sva


def _frobenius_tail_oracle(W, N, big=2000):
    f = series(W, 2 * big)
    Hb = scipy.linalg.hankel(f[:big], f[big - 1 :])
    Hb[:N, :N] = 0.0
    return np.linalg.norm(Hb)


def test_truncated_hankel_entries():
    T = truncated_hankel(Wfa([1.0], [[0.5]], [1.0]), 3)
    np.testing.assert_allclose(T.entries, [[1, 0.5, 0.25], [0.5, 0.25, 0.125], [0.25, 0.125, 0.0625]])
    np.testing.assert_allclose(T.coefficients, [1, 0.5, 0.25, 0.125, 0.0625])


def test_truncated_hankel_rejects_size(ex1):
    with pytest.raises(InputError):
        truncated_hankel(ex1, 0)


def test_example1_singular_values_at_64(ex1):
    s = truncated_hankel(ex1, 64).singular_values
    np.testing.assert_allclose(s[:2], [0.8, 0.2], atol=1e-12)
    assert s[2] < 1e-15


def test_singular_values_match_svd(three_state):
    T = truncated_hankel(three_state, 40)
    ref = np.linalg.svd(T.entries, compute_uv=False)
    np.testing.assert_allclose(T.singular_values, ref, atol=1e-15)
    np.testing.assert_allclose(T.singular_values[:3], THREE_STATE_SINGULAR, rtol=1e-12)


@pytest.mark.parametrize("N", [4, 8, 16])
def test_tail_bound_dominates_oracle(three_state, N):
    est = tail_bound(three_state, N)
    ref = _frobenius_tail_oracle(three_state, N)
    assert est >= ref * (1 - 1e-9)
    assert est <= 10 * ref


def test_tail_bound_random(rng):
    for _ in range(10):
        W = random_minimal_sva(rng, 4).wfa
        for N in (8, 32):
            ref = _frobenius_tail_oracle(W, N, big=600)
            assert tail_bound(W, N) >= ref * (1 - 1e-9) - 1e-300


def test_tail_bound_nilpotent():
    W = Wfa([1.0, 0.0], [[0.0, 1.0], [0.0, 0.0]], [0.0, 1.0])
    assert tail_bound(W, 2) == 0.0


def test_tail_bound_rejects_unstable():
    with pytest.raises(SpectralRadiusTooLarge):
        tail_bound(Wfa([1.0], [[1.0]], [1.0]), 8)


def test_auto_hankel_size(ex1, three_state):
    for W in (ex1, three_state):
        N = auto_hankel_size(W)
        scale = truncated_hankel(W, 16).norm
        assert tail_bound(W, N) < 1e-8 * scale
        if N > 16:
            assert tail_bound(W, N // 2) >= 1e-8 * scale


def test_auto_hankel_size_cap():
    W = Wfa([1.0], [[0.999]], [1.0])
    with pytest.warns(TruncationWarning):
        assert auto_hankel_size(W, cap=64) == 64
    assert AUTO_CAP == 1024


def test_spectral_error_identical(ex1):
    err, tail, N = spectral_error_details(ex1, ex1)
    assert err < 1e-15
    assert tail < 1e-15


def test_spectral_error_scalar():
    # ||H|| of c 0.5^k is c / (1 - 1/4)
    W1 = Wfa([1.0], [[0.5]], [1.0])
    W2 = Wfa([0.5], [[0.5]], [1.0])
    assert spectral_error(W1, W2) == pytest.approx(0.5 / 0.75, rel=1e-12)


def test_svd_truncation_baseline(three_state):
    T = truncated_hankel(three_state, 32)
    approx, err = svd_truncation_baseline(T, 1)
    assert err == pytest.approx(THREE_STATE_SINGULAR[1], rel=1e-10)
    assert np.linalg.norm(T.entries - approx, 2) == pytest.approx(err, rel=1e-10)
    fast = svd_truncation_baseline(T, 1, matrix=False)
    assert fast[0] is None
    assert fast[1] == pytest.approx(err, rel=1e-12)
    assert svd_truncation_baseline(T, 40)[1] == 0.0


def test_sva_truncation_baseline(ex1):
    S = to_sva(ex1)
    W = sva_truncation_baseline(S, 1)
    assert W.n == 1
    # keeps f(0) = 3/4, error is the Hankel norm of the odd/even remainder
    assert W(0) == pytest.approx(0.75)
    assert spectral_error(ex1, W) >= 0.2
    assert sva_truncation_baseline(S, 5) is S.wfa


def test_polynomial_method_example1(ex1):
    G = polynomial_method(to_sva(ex1), 1, 16)
    expected = np.zeros((16, 16))
    expected[0, 0] = 0.8
    np.testing.assert_allclose(G, expected, atol=1e-12)


def test_polynomial_method_matches_reduction(rng):
    S = random_minimal_sva(rng, 5)
    N = 32
    for k in range(1, 5):
        G = polynomial_method(S, k, N)
        Ghat = truncated_hankel(aak_reduce(S, k, verify=False).reduced, N).entries
        np.testing.assert_allclose(G, Ghat, atol=1e-9 * S.singular_numbers[0])


def test_polynomial_method_rejects_k(ex1):
    with pytest.raises(InputError):
        polynomial_method(to_sva(ex1), 0, 8)


def test_write_csv(tmp_path, ex1):
    T = truncated_hankel(ex1, 4)
    p = tmp_path / "h.csv"
    write_csv(T, p)
    rows = list(csv.reader(p.open()))
    assert len(rows) == 5
    assert float(rows[0][0]) == T.entries[0, 0]
    assert rows[4][0] == "singular_values"
    assert float(rows[4][1]) == pytest.approx(T.singular_values[0])
