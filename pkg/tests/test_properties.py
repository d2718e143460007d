import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as hst

from hmin import measures as ms
from hmin import states as st
from hmin.basis import bloch_decompose
from hmin.linalg import partial_trace, psd_sqrt
from hmin.measurements import apply_local_measurement, projective_from_unitary

seeds = hst.integers(0, 2**32 - 1)
dims = hst.sampled_from([(2, 2), (2, 3), (3, 2)])
FAST = settings(max_examples=25, deadline=None)
SLOW = settings(max_examples=8, deadline=None)


@FAST
@given(seeds, dims)
def test_random_states_are_valid(seed, mn):
    m, n = mn
    rho = st.random_density(m, n, seed=seed).matrix
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.linalg.eigvalsh(rho)[0] > -1e-12


@FAST
@given(seeds, dims)
def test_partial_traces_commute_with_trace(seed, mn):
    rho = st.random_density(*mn, seed=seed).matrix
    a = partial_trace(rho, mn, "a")
    b = partial_trace(rho, mn, "b")
    assert abs(np.trace(a) - np.trace(b)) < 1e-12


@FAST
@given(seeds, dims)
def test_bloch_roundtrip(seed, mn):
    rho = st.random_density(*mn, seed=seed).matrix
    bd = bloch_decompose(rho, *mn)
    np.testing.assert_allclose(bd.reconstruct(), rho, atol=1e-10)
    # orthonormal basis: Parseval
    assert abs(np.sum(bd.gamma**2) - np.vdot(rho, rho).real) < 1e-10


@FAST
@given(seeds, hst.sampled_from([2, 3, 4]))
def test_psd_sqrt_is_psd_root(seed, d):
    rho = st.random_density(d, 1, rank=max(1, d - 1), seed=seed).matrix
    s = psd_sqrt(rho)
    assert np.max(np.abs(s @ s - rho)) < 1e-9
    assert np.linalg.eigvalsh(s)[0] > -1e-12


@FAST
@given(seeds, dims)
def test_measurement_is_idempotent_and_trace_preserving(seed, mn):
    rng = np.random.default_rng(seed)
    rho = st.random_density(*mn, seed=rng).matrix
    meas = projective_from_unitary(st.random_unitary(mn[0], rng))
    once = apply_local_measurement(rho, meas)
    np.testing.assert_allclose(apply_local_measurement(once, meas), once, atol=1e-12)
    assert abs(np.trace(once) - 1) < 1e-12
    np.testing.assert_allclose(partial_trace(once, mn, "b"), partial_trace(rho, mn, "b"), atol=1e-12)


@SLOW
@given(seeds, dims)
def test_h_min_bounded_by_upper_bound(seed, mn):
    rho = st.random_density(*mn, seed=seed)
    v = ms.h_min(rho).value
    assert -1e-12 <= v <= ms.h_min_upper_bound(rho) + 1e-8


@SLOW
@given(seeds)
def test_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    rho = st.random_density(2, 3, seed=rng)
    moved = rho.conjugate_by(st.random_unitary(2, rng), st.random_unitary(3, rng))
    assert abs(ms.h_min(moved).value - ms.h_min(rho).value) < 1e-6


@SLOW
@given(seeds)
def test_closed_form_matches_search(seed):
    rep = ms.h_min(st.random_density(2, 2, seed=seed))
    assert rep.cross_check < 1e-6


@SLOW
@given(hst.floats(0.0, 1.0))
def test_bell_diagonal_h_min_at_most_hs_min(c):
    assert ms.h_min_bell_diagonal([-c] * 3) <= ms.hs_min_bell_diagonal([-c] * 3) + 1e-12


@FAST
@given(hst.integers(2, 5), hst.floats(-1.0, 1.0))
def test_werner_formula_nonnegative(d, x):
    assert ms.h_min_werner(d, x) >= 0.0


@FAST
@given(hst.floats(0.05, 6.0), hst.integers(0, 8), hst.integers(0, 8))
def test_sequential_dual_path(strength, a, b):
    bell = st.bell_state()
    meas = ms.optimal_measurement(bell)
    direct, formula = ms.seq_distance_paths(bell, meas, strength, a, b)
    assert abs(direct - formula) < 1e-10
