import math
import warnings

import numpy as np
import pytest

from wfa_aak.aak import (
    BRANCH_NONZERO,
    BRANCH_ZERO,
    aak_reduce,
    allpass_matrices,
    block_diagonalize,
    build_error_wfa,
    constraint_residuals,
    group_multiplicity,
    partition,
    solve_auxiliary,
    verify_allpass,
)
from wfa_aak.errors import (
    EigenvalueOnCircle,
    GroupNotAtBoundary,
    InputError,
    SingularCore,
    TruncationWarning,
)
from wfa_aak.generators import random_minimal_sva, stretch
from wfa_aak.hankel import spectral_error
from wfa_aak.symbol import unimodularity_check
from conftest import data_path
from wfa_aak.wfa import Wfa, load_wfa, direct_sum, equivalent, minimize, series, to_sva

SQ3 = math.sqrt(3)


@pytest.fixture
def ex1_sva(ex1):
    return to_sva(ex1)


# --- tie groups and partition --------------------------------------------------


def test_group_multiplicity_simple():
    r, perm = group_multiplicity([3.0, 2.0, 1.0], 1)
    assert r == 1
    assert list(perm) == [0, 2, 1]


def test_group_multiplicity_tied():
    r, perm = group_multiplicity([3.0, 2.0, 2.0, 1.0], 1)
    assert r == 2
    assert list(perm) == [0, 3, 1, 2]


def test_group_multiplicity_within_tolerance():
    r, _ = group_multiplicity([1.0, 0.5, 0.5 - 1e-12, 0.1], 1)
    assert r == 2


def test_group_multiplicity_inside_group():
    with pytest.raises(GroupNotAtBoundary) as exc:
        group_multiplicity([3.0, 2.0, 2.0, 1.0], 2)
    assert (exc.value.start, exc.value.stop) == (1, 3)


def test_partition_example1(ex1_sva):
    Pb = partition(ex1_sva, 1)
    assert (Pb.m, Pb.r) == (1, 1)
    np.testing.assert_allclose(Pb.R, [[-0.6]], atol=1e-14)
    np.testing.assert_allclose(Pb.A11, [[0.0]], atol=1e-15)
    np.testing.assert_allclose(Pb.alpha2, [0.0], atol=1e-15)
    np.testing.assert_allclose(Pb.beta1, [SQ3 / 2], atol=1e-15)


@pytest.mark.parametrize("k", [0, 2, -1])
def test_partition_rejects_k(ex1_sva, k):
    with pytest.raises(InputError):
        partition(ex1_sva, k)


def test_partition_all_tied():
    S = to_sva(minimize(stretch(Wfa([1.0], [[0.5]], [1.0]), 3)))
    # (4/3, 2/3, 2/3): reducing to the tied level is fine, nothing below it
    assert partition(S, 1).r == 2


# --- auxiliary automaton ----------------------------------------------------------


def test_auxiliary_example1(ex1_sva):
    aux = solve_auxiliary(partition(ex1_sva, 1))
    assert aux.branch == BRANCH_ZERO
    np.testing.assert_allclose(aux.A_hat, [[0.0]], atol=1e-14)
    np.testing.assert_allclose(aux.beta_hat, [2 / SQ3], atol=1e-13)
    np.testing.assert_allclose(aux.alpha_hat, [2 * SQ3 / 5], atol=1e-13)
    assert aux.constraint_residual < 1e-14


def test_auxiliary_nonzero_branch_satisfies_identities(rng):
    S = random_minimal_sva(rng, 4)
    for k in range(1, 4):
        Pb = partition(S, k)
        aux = solve_auxiliary(Pb)
        assert aux.branch == BRANCH_NONZERO
        assert constraint_residuals(Pb, aux.A_hat, aux.alpha_hat, aux.beta_hat) < 1e-9


def test_allpass_example1(ex1_sva):
    Pb = partition(ex1_sva, 1)
    E = build_error_wfa(Pb, solve_auxiliary(Pb))
    assert max(verify_allpass(E)) < 1e-14
    assert E.constant == pytest.approx(0.0, abs=1e-14)
    Pe, Qe = allpass_matrices(Pb)
    np.testing.assert_allclose(Pe @ Qe, 0.04 * np.eye(3), atol=1e-14)


def test_beta_hat_perturbation_breaks_allpass(ex1_sva, rng):
    S = random_minimal_sva(rng, 4)
    for Sv, k in ((ex1_sva, 1), (S, 2)):
        Pb = partition(Sv, k)
        aux = solve_auxiliary(Pb)
        bad = type(aux)(aux.A_hat, aux.alpha_hat, aux.beta_hat + 1e-3, aux.branch, 0.0)
        assert verify_allpass(build_error_wfa(Pb, bad))[0] > 1e-4


# --- block diagonalisation -----------------------------------------------------------


def test_block_diagonalize_diagonal():
    W = Wfa([1.0, 1.0], np.diag([0.5, 2.0]), [1.0, 1.0])
    s, u = block_diagonalize(W)
    assert (s.n, u.n) == (1, 1)
    assert s.A[0, 0] == pytest.approx(0.5)
    assert u.A[0, 0] == pytest.approx(2.0)
    assert equivalent(direct_sum(s, u), W)


def test_block_diagonalize_coupled():
    W = Wfa([1.0, 0.0], [[0.5, 1.0], [0.0, 2.0]], [0.0, 1.0])
    s, u = block_diagonalize(W)
    # f(k) = (2^k - 0.5^k) / 1.5
    np.testing.assert_allclose(series(s, 5), -(0.5 ** np.arange(5)) / 1.5, atol=1e-13)
    np.testing.assert_allclose(series(u, 5), 2.0 ** np.arange(5) / 1.5, atol=1e-12)


def test_block_diagonalize_all_stable():
    W = Wfa([1.0], [[0.3]], [1.0])
    s, u = block_diagonalize(W)
    assert (s.n, u.n) == (1, 0)


def test_block_diagonalize_rejects_circle():
    with pytest.raises(EigenvalueOnCircle):
        block_diagonalize(Wfa([1.0, 1.0], np.diag([0.5, 1.0]), [1.0, 1.0]))


# --- full reduction ---------------------------------------------------------------------


def test_reduce_example1(ex1_sva):
    rep = aak_reduce(ex1_sva, 1)
    assert rep.certified
    assert rep.reduced.n == 1
    assert rep.reduced(0) == pytest.approx(0.8, abs=1e-12)
    np.testing.assert_allclose(series(rep.reduced, 6)[1:], 0.0, atol=1e-14)
    assert rep.achieved_error == pytest.approx(0.2, abs=1e-9)
    assert rep.unstable.n == 0


def test_reduce_rejects_k(ex1_sva):
    with pytest.raises(InputError):
        aak_reduce(ex1_sva, 2)
    with pytest.raises(InputError):
        aak_reduce(ex1_sva, 0)


def test_reduce_three_state_all_ranks(three_state):
    S = to_sva(three_state)
    for k in (1, 2):
        rep = aak_reduce(S, k)
        assert rep.certified, rep.failures()
        assert rep.reduced.n == k
        # independent measurement at a fixed large truncation
        err = spectral_error(three_state, rep.reduced, 256)
        assert err == pytest.approx(S.singular_numbers[k], rel=1e-8)


def test_reduce_error_monotone_in_k(rng):
    S = random_minimal_sva(rng, 6)
    errs = [aak_reduce(S, k).achieved_error for k in range(1, 6)]
    assert all(a >= b for a, b in zip(errs, errs[1:]))


def test_report_to_dict(ex1_sva):
    d = aak_reduce(ex1_sva, 1).to_dict()
    assert d["reduction"]["branch"] == BRANCH_ZERO
    assert d["reduction"]["certified"] is True
    assert [b["method"] for b in d["baselines"]] == ["aak", "sva_truncation", "svd_truncation"]
    assert d["input"]["singular_numbers"] == pytest.approx([0.8, 0.2])


def test_reduce_without_verification(ex1_sva):
    rep = aak_reduce(ex1_sva, 1, verify=False)
    assert rep.achieved_error is None
    assert rep.certified is None
    assert rep.unimodularity_deviation < 1e-12


# --- tied singular numbers ------------------------------------------------------------


@pytest.fixture
def stretched3(three_state):
    return to_sva(minimize(stretch(three_state, 3)))


def test_stretch_produces_pairs(stretched3):
    D = stretched3.singular_numbers
    assert stretched3.n == 9
    np.testing.assert_allclose(D[1], D[2], rtol=1e-10)
    np.testing.assert_allclose(D[4], D[5], rtol=1e-10)


@pytest.mark.parametrize("k", [1, 4])
def test_reduce_tied_group(stretched3, k):
    rep = aak_reduce(stretched3, k)
    assert rep.r == 2
    assert rep.branch == BRANCH_ZERO
    assert rep.certified, rep.failures()
    assert rep.reduced.n == k


def test_reduce_tied_group_small_sigma(stretched3):
    # sigma_7 / sigma_0 ~ 1.4e-4
    rep = aak_reduce(stretched3, 7)
    assert rep.r == 2
    assert rep.certified, rep.failures()


def test_ill_conditioned_not_certified():
    S = to_sva(minimize(load_wfa(data_path("ill_conditioned.json"))))
    with pytest.warns(TruncationWarning):
        rep = aak_reduce(S, 5)
    assert rep.failures() == ["unimodularity"]
    assert rep.certified is False
    assert rep.achieved_error == pytest.approx(rep.sigma_k, rel=1e-6)


def test_reduce_inside_group(stretched3):
    with pytest.raises(GroupNotAtBoundary):
        aak_reduce(stretched3, 2)


@pytest.mark.parametrize("s, k", [(2, 2), (3, 3)])
def test_singular_core_structural(three_state, s, k):
    S = to_sva(minimize(stretch(three_state, s)))
    with pytest.raises(SingularCore):
        aak_reduce(S, k)


def test_ex1_stretch_large_group(ex1):
    S = to_sva(minimize(stretch(ex1, 3)))
    rep = aak_reduce(S, 1)
    assert rep.r == 5
    assert rep.certified


def test_alpha_hat_perturbation_negative_control(stretched3, rng):
    cases = [(stretched3, 1), (random_minimal_sva(rng, 4), 2)]
    for S, k in cases:
        Pb = partition(S, k)
        aux = solve_auxiliary(Pb)
        bad = type(aux)(aux.A_hat, aux.alpha_hat + 1e-3, aux.beta_hat, aux.branch, 0.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            dev = unimodularity_check(S, k, 1000, error=build_error_wfa(Pb, bad)).deviation
        assert dev > 1e-4


@pytest.mark.parametrize("k", [1, 4])
def test_tied_zero_branch_solution_is_unique(stretched3, k):
    # r < n/2 with alpha2 = 0: the joint identities have full column rank,
    # so the auxiliary automaton (hence the Hankel matrix) is unique
    from wfa_aak.aak import _constraint_system

    Pb = partition(stretched3, k)
    assert 2 * Pb.r < Pb.n
    M, _ = _constraint_system(Pb)
    sv = np.linalg.svd(M, compute_uv=False)
    assert sv[-1] > 1e-6 * sv[0]
    rep = aak_reduce(stretched3, k, verify=False)
    err = spectral_error(stretched3.wfa, rep.reduced, 256)
    assert err == pytest.approx(rep.sigma_k, rel=1e-8)
