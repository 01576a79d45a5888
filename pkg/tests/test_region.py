import io
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from spinline.chain import build_profile, custom_chain
from spinline.errors import InvalidParameterError
from spinline.region import (
    DEFAULT_D_VALUES,
    R_profile,
    creatable_map,
    critical_length,
    find_t0,
    intervals_disjoint,
    lambda_min_cr,
    lambda_min_direct,
    policy_window,
    q_bounds,
    rasterize,
    selective_bounds,
    selective_suite,
)
from spinline.spectral import amplitude, amplitude_series, decompose_chain
from spinline.statemap import lambda_beta1

S2 = math.sqrt(2) / 2


# --- t0 ---------------------------------------------------------------------


@pytest.mark.parametrize("n, window, t0", [(6, (0, 9), 7.884), (60, (0, 90), 63.881), (120, (0, 180), 124.761)])
def test_homogeneous_t0(n, window, t0):
    res = find_t0(build_profile("homogeneous", n), window)
    assert abs(res.t0 - t0) < 0.01
    assert res.nondegenerate


@pytest.mark.parametrize("n", [2, 5, 20, 57])
def test_ekert_t0_is_pi(n):
    res = find_t0(build_profile("ekert", n), (0, 4))
    assert abs(res.t0 - math.pi) < 1e-6
    assert abs(res.r_max - 1) < 1e-9


@pytest.mark.parametrize("window", [(3, 3), (5, 2), (-1, 4), (0, math.inf), "x"])
def test_invalid_window(window):
    with pytest.raises(InvalidParameterError):
        find_t0(build_profile("homogeneous", 4), window)


def test_t0_search_respects_window_start():
    res = find_t0(build_profile("homogeneous", 6), (8.5, 12.0))
    assert 8.5 <= res.t0 <= 12.0


random_chains = st.one_of(
    st.builds(lambda n, d: build_profile("alternating", n, d), st.integers(2, 24), st.floats(0.2, 2.0)),
    st.lists(st.floats(0.2, 2.0), min_size=1, max_size=16).map(custom_chain),
)


@settings(max_examples=60, deadline=None)
@given(random_chains, st.floats(0, 20), st.floats(0.5, 30))
def test_t0_is_sampled_maximum(spec, lo, width):
    res = find_t0(spec, (lo, lo + width))
    assert lo <= res.t0 <= lo + width
    assert 0 < res.r_max <= 1 + 1e-12
    sd = decompose_chain(spec)
    grid = np.linspace(lo, lo + width, 4001)
    assert res.r_max >= np.abs(amplitude_series(sd, spec.n, 1, grid)).max() - 1e-12


symmetric_chains = st.one_of(
    st.builds(lambda n: build_profile("homogeneous", n), st.integers(3, 60)),
    st.builds(lambda h, d: build_profile("alternating", 2 * h, d), st.integers(2, 20), st.floats(0.2, 2.0)),
    st.lists(st.floats(0.3, 2.0), min_size=1, max_size=10).map(lambda c: custom_chain(c + c[::-1][1:])),
)


@settings(max_examples=80, deadline=None)
@given(symmetric_chains)
def test_nondegenerate_t0_zeroes_neighbour_amplitudes(spec):
    n = spec.n
    window = (0.0, 1.5 * n)
    res = find_t0(spec, window)
    assume(res.nondegenerate)
    # the stationarity argument needs an interior maximum
    assume(window[0] + 1e-6 < res.t0 < window[1] - 1e-6)
    sd = decompose_chain(spec)
    assert abs(amplitude(sd, n - 1, 1, res.t0)) < 1e-6
    assert abs(amplitude(sd, n, 2, res.t0)) < 1e-6


def test_time_search_json():
    d = find_t0(build_profile("homogeneous", 6), (0, 9)).to_dict()
    assert set(d) == {"t0", "r_max", "nondegenerate"}


# --- maps -------------------------------------------------------------------


def test_ekert_map_covers_rectangle():
    m = creatable_map(build_profile("ekert", 20), math.pi, 201)
    assert m.lam.min() <= 0.5 + 1e-6
    b = m.beta1[m.beta1_defined]
    assert b.min() == pytest.approx(0, abs=1e-9)
    assert b.max() == pytest.approx(1, abs=1e-9)


def test_map_at_zero_time():
    m = creatable_map(build_profile("alternating", 9, 0.3), 0.0, 31)
    assert np.all(m.lam == 1.0)


def test_long_homogeneous_map_is_confined():
    spec = build_profile("homogeneous", 120)
    t0 = find_t0(spec, (0, 180)).t0
    m = creatable_map(spec, t0, 101)
    assert m.lam.min() > 0.72
    assert np.nanmax(m.beta1) < 0.23


@settings(max_examples=40, deadline=None)
@given(random_chains, st.floats(0, 100), st.integers(2, 40))
def test_map_invariants(spec, t, grid_n):
    m = creatable_map(spec, t, grid_n)
    assert m.lam.shape == (grid_n, grid_n)
    assert np.all((m.lam >= 0.5) & (m.lam <= 1.0))
    b = m.beta1[m.beta1_defined]
    assert np.all((b >= 0) & (b <= 1))
    assert np.all(np.isnan(m.beta1[~m.beta1_defined]))


def test_map_rejects_bad_input():
    spec = build_profile("homogeneous", 4)
    with pytest.raises(InvalidParameterError):
        creatable_map(spec, 1.0, 1)
    with pytest.raises(InvalidParameterError):
        creatable_map(spec, -1.0, 5)
    with pytest.raises(InvalidParameterError):
        creatable_map(spec, 1.0, 5, phases="free")


def test_ekert_map_raster_coverage():
    # near lambda = 1/2 beta1 sweeps [0, 1] within a tiny alpha neighbourhood,
    # so the uniform grid has to be dense to reach those cells
    m = creatable_map(build_profile("ekert", 20), math.pi, 2501)
    got = rasterize(m.lam, m.beta1)
    # analytic map: R0 = sin(a1 pi/2), R spanning [0, 1]
    a = np.linspace(0, 1, 3001)
    R0 = np.sin(a * math.pi / 2)[:, None]
    RN = np.sqrt(1 - R0**2) * np.linspace(0, 1, 3001)[None, :]
    lam, beta1, _ = lambda_beta1(R0, RN)
    ref = rasterize(lam, beta1)
    assert (got & ref).sum() / ref.sum() >= 0.99


def test_map_csv_is_row_major():
    m = creatable_map(build_profile("homogeneous", 4), 2.0, 3)
    lines = m.to_csv().splitlines()
    assert lines[0] == "alpha1,alpha2,lambda,beta1,beta1_defined"
    assert len(lines) == 10
    first = [row.split(",")[:2] for row in lines[1:4]]
    assert [float(v) for v in first[1]] == [0.0, 0.5]
    buf = io.StringIO()
    m.to_csv(buf)
    assert buf.getvalue() == m.to_csv()


def test_gridlines_shape():
    m = creatable_map(build_profile("homogeneous", 5), 3.0, 11)
    lines = m.gridlines(every=5)
    assert [g[0] for g in lines["alpha1"]] == [0.0, 0.5, 1.0]
    assert all(g[1].shape == (11,) for g in lines["alpha2"])


# --- minimal eigenvalue -----------------------------------------------------


@pytest.mark.parametrize("n", [4, 20, 80])
def test_lambda_min_ekert(n):
    assert lambda_min_cr(build_profile("ekert", n), (0, 4)) == 0.5


def test_lambda_min_homogeneous():
    assert lambda_min_cr(build_profile("homogeneous", 6), (0, 9)) == 0.5
    assert lambda_min_cr(build_profile("homogeneous", 35), (0, 52.5)) > 0.5


oracle_chains = st.one_of(
    st.builds(lambda n: build_profile("homogeneous", n), st.integers(3, 70)),
    st.builds(lambda h, d: build_profile("alternating", 2 * h, d), st.integers(2, 30), st.floats(0.2, 2.0)),
    st.lists(st.floats(0.3, 2.0), min_size=1, max_size=12).map(lambda c: custom_chain(c + c[::-1][1:])),
)


@settings(max_examples=25, deadline=None)
@given(oracle_chains)
def test_shortcut_matches_grid_oracle(spec):
    window = (0.0, 1.5 * spec.n)
    sd = decompose_chain(spec)
    res = find_t0(spec, window, sd=sd)
    # the closed form assumes r_N2(t0) = 0, which needs an interior maximum
    assume(window[0] + 1e-6 < res.t0 < window[1] - 1e-6)
    direct = lambda_min_direct(spec, [res.t0], sd=sd)
    assert abs(direct - lambda_min_cr(spec, window, sd=sd)) < 1e-6


def test_shortcut_is_upper_bound_at_window_edge():
    spec = build_profile("alternating", 4, 0.5)
    sd = decompose_chain(spec)
    res = find_t0(spec, (0, 6), sd=sd)
    assert res.t0 == 6.0
    p2 = abs(amplitude(sd, 4, 2, res.t0))
    direct = lambda_min_direct(spec, [res.t0], sd=sd)
    assert direct < lambda_min_cr(spec, (0, 6), sd=sd) - 1e-4
    assert direct == pytest.approx(max(0.5, 1 - res.r_max**2 - p2**2), abs=1e-9)


@pytest.mark.parametrize(
    "spec, exact",
    [
        (build_profile("homogeneous", 40), True),
        (build_profile("ekert", 7), True),
        (build_profile("alternating", 12, 0.5), False),
    ],
)
def test_shortcut_against_oracle_over_time_grid(spec, exact):
    window = (0.0, 1.5 * spec.n)
    res = find_t0(spec, window)
    times = np.append(np.arange(0.0, window[1], 0.25), res.t0)
    direct = lambda_min_direct(spec, times, grid_n=41, phase_n=12)
    shortcut = lambda_min_cr(spec, window)
    assert direct <= shortcut + 1e-6
    if exact:
        assert abs(direct - shortcut) < 1e-6
    else:
        # hypot(r_N1, r_N2) peaks away from t0 for this slow chain
        assert direct < shortcut - 1e-3


# --- critical length --------------------------------------------------------


def test_homogeneous_critical_length():
    report = critical_length("homogeneous", "standard", range(2, 41), threads=1)
    assert report.n_c == 34
    rec = {r.n: r for r in report.records}
    assert rec[34].qualifies and not rec[35].qualifies
    assert rec[35].lambda_min_cr == pytest.approx(1 - rec[35].r_max**2, abs=1e-9)


def test_d1_alternating_matches_homogeneous():
    hom = critical_length("homogeneous", "standard", range(2, 41), threads=1)
    alt = critical_length("alternating", "standard", range(2, 41), d_values=[1.0], threads=1)
    assert [(r.r_max, r.t0) for r in alt.records] == [(r.r_max, r.t0) for r in hom.records]
    assert alt.n_c == hom.n_c


def test_report_independent_of_thread_count():
    kwargs = dict(n_range=range(2, 30, 2), d_values=[0.3, 0.9, 1.5])
    one = critical_length("alternating", "alt-w2", threads=1, **kwargs)
    many = critical_length("alternating", "alt-w2", threads=4, **kwargs)
    assert one.to_dict() == many.to_dict()


def test_report_json_keys():
    d = critical_length("homogeneous", "standard", [4, 6], threads=1).to_dict()
    assert set(d) == {"family", "window", "records", "n_c", "n_c_by_d"}
    assert set(d["records"][0]) == {"n", "d", "r_max", "t0", "lambda_min_cr", "qualifies"}


def test_policy_windows():
    assert policy_window("standard", "homogeneous", 10) == (0.0, 15.0)
    assert policy_window("alt-w1", "alternating", 10, 0.5) == pytest.approx((0.0, 6.5))
    assert policy_window("alt-w2", "alternating", 10, 0.5) == pytest.approx((6.5, 30.0))
    assert policy_window("alt-odd", "alternating", 11, 2.0) == pytest.approx((0.0, 16.5))
    assert policy_window("alt-w1-unscaled", "alternating", 10, 0.5) == pytest.approx((0.0, 0.65))


@pytest.mark.parametrize(
    "args",
    [
        ("homogeneous", "bogus", [4]),
        ("homogeneous", "alt-w1", [4]),
        ("homogeneous", "standard", []),
        ("zigzag", "standard", [4]),
    ],
)
def test_critical_length_errors(args):
    with pytest.raises(InvalidParameterError):
        critical_length(*args, threads=1)


def test_default_d_sweep():
    assert DEFAULT_D_VALUES[0] == 0.1 and DEFAULT_D_VALUES[-1] == 2.0
    assert len(DEFAULT_D_VALUES) == 96
    assert all(type(d) is float for d in DEFAULT_D_VALUES)


def test_thread_env_variable(monkeypatch):
    from spinline.region import default_threads

    monkeypatch.setenv("SPINLINE_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("SPINLINE_THREADS", "zero")
    with pytest.raises(InvalidParameterError):
        default_threads()


# --- every R reachable on [0, T] is reachable before R peaks ----------------


@pytest.mark.parametrize(
    "spec", [build_profile("homogeneous", 16), build_profile("alternating", 14, 0.6), build_profile("ekert", 9)]
)
def test_states_reachable_before_R_peaks(spec):
    T = 1.5 * spec.n
    sd = decompose_chain(spec)
    times = np.arange(0.0, T, 0.02)
    r1 = np.abs(amplitude_series(sd, spec.n, 1, times))
    r2 = np.abs(amplitude_series(sd, spec.n, 2, times))
    # with phase matching, alpha2 sweeps R over [min(r1, r2), hypot(r1, r2)]
    lo, hi = np.minimum(r1, r2), np.hypot(r1, r2)
    peak = int(np.argmax(hi))
    targets = np.linspace(0, hi[peak], 400)
    early = (lo[: peak + 1, None] <= targets + 1e-9) & (targets - 1e-9 <= hi[: peak + 1, None])
    gaps = ~early.any(axis=0)
    # adjacent samples differ by at most the grid resolution of R
    step = np.abs(np.diff(hi[: peak + 1])).max()
    for g in np.flatnonzero(gaps):
        assert np.min(np.abs(hi[: peak + 1] - targets[g])) <= step


@pytest.mark.parametrize("spec", [build_profile("homogeneous", 16), build_profile("ekert", 9)])
def test_R_peaks_at_t0_when_r_N1_dominates(spec):
    window = (0.0, 1.5 * spec.n)
    sd = decompose_chain(spec)
    res = find_t0(spec, window, sd=sd)
    times = np.arange(0.0, window[1], 0.02)
    r1 = np.abs(amplitude_series(sd, spec.n, 1, times))
    r2 = np.abs(amplitude_series(sd, spec.n, 2, times))
    best = np.hypot(r1, r2).max()
    assert res.r_max - 1e-3 <= best <= res.r_max + 1e-9


def test_R_can_peak_away_from_t0():
    spec = build_profile("alternating", 14, 0.6)
    sd = decompose_chain(spec)
    res = find_t0(spec, (0, 21), sd=sd)
    times = np.arange(0.0, 21, 0.02)
    best = np.hypot(
        np.abs(amplitude_series(sd, 14, 1, times)), np.abs(amplitude_series(sd, 14, 2, times))
    ).max()
    assert best > res.r_max + 0.1


# --- selective bounds -------------------------------------------------------


def test_bounds_at_symmetric_t0():
    spec = build_profile("homogeneous", 10)
    res = find_t0(spec, (0, 15))
    for phases in ("fixed", "matched"):
        lo, hi = selective_bounds(spec, res.t0, phases=phases)
        assert lo == pytest.approx(0, abs=1e-6)
        assert hi == pytest.approx(res.r_max, abs=1e-9)


def test_bounds_equal_moduli():
    assert q_bounds(0.5, 0.5j, "matched") == pytest.approx((0.5, S2), abs=1e-15)
    assert q_bounds(0.5, 0.5, "fixed") == pytest.approx((0.5, S2), abs=1e-15)


amps = st.builds(lambda r, c: r * np.exp(2j * np.pi * c), st.floats(0, 1), st.floats(0, 1))


@settings(max_examples=200)
@given(amps, amps, st.sampled_from(["fixed", "matched"]))
def test_bounds_match_alpha2_sweep(p1, p2, phases):
    scale = math.hypot(abs(p1), abs(p2))
    assume(scale <= 1)
    lo, hi = q_bounds(p1, p2, phases)
    R = R_profile(p1, p2, np.linspace(0, 1, 20001), phases)
    assert lo <= hi
    assert lo <= R.min() + 1e-12 and R.max() <= hi + 1e-12
    # the maximum is smooth; the fixed-phase minimum may be a kink at R = 0,
    # resolved only to (slope) x (half a grid step)
    assert hi - R.max() < 1e-7
    assert R.min() - lo < 1e-7 + (math.pi / 2) * scale * 0.5 / 20000


def test_bounds_reject_negative_time():
    with pytest.raises(InvalidParameterError):
        selective_bounds(build_profile("homogeneous", 4), -0.1)


def test_homogeneous_braids_disjoint():
    report = selective_suite([(build_profile("homogeneous", 6), 9.375), (build_profile("homogeneous", 60), 62.7)])
    assert report.all_disjoint


def test_ekert_braids_disjoint():
    spec = build_profile("ekert", 120)
    report = selective_suite([(spec, 2.994), (spec, 2.895), (spec, 2.816)])
    assert report.all_disjoint
    assert len(report.to_dict()["entries"]) == 3


def test_identical_entries_overlap():
    spec = build_profile("homogeneous", 6)
    report = selective_suite([(spec, 9.375), (spec, 9.375)])
    assert not report.all_disjoint


def test_suite_needs_two_entries():
    with pytest.raises(InvalidParameterError):
        selective_suite([(build_profile("homogeneous", 6), 1.0)])


def test_disjoint_margin():
    assert intervals_disjoint((0.0, 0.1), (0.2, 0.3))
    assert not intervals_disjoint((0.0, 0.1), (0.1005, 0.3))
