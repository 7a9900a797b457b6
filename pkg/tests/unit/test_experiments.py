import logging
import math

import numpy as np
import pytest

from scaled_trajectories._internal.experiments import (
    arrival_time,
    barrier_time_scale,
    stationary_diffraction_density,
    transmission_through_detector,
)


@pytest.fixture
def diffraction_grid(apiver_module):
    return apiver_module.TimeGrid.span(20.0, dt=1e-2)


@pytest.fixture
def tunneling_grid(apiver_module):
    return apiver_module.TimeGrid.span(150.0, dt=1e-2, sample_every=100)


def _tunneling(apiver_module, grid, *, epsilon=1.0, gamma=0.0, variant="kostin_scaled", **field):
    return apiver_module.run_tunneling(
        apiver_module.SystemParams(epsilon=epsilon),
        apiver_module.Friction(gamma_r=gamma),
        apiver_module.DrivenRepeller(**field),
        grid,
        width_variant=variant,
    )


def test_experiment_result__columns_must_match(apiver_module):
    with pytest.raises(apiver_module.InvalidParameterException, match="differ"):
        apiver_module.ExperimentResult("diffraction", {"t": np.zeros(3), "rho": np.zeros(4)})
    result = apiver_module.ExperimentResult("diffraction", {"t": np.zeros(3)})
    assert result.n_rows == 3


def test_first_local_maximum_and_following_minimum(apiver_module):
    times = np.linspace(0.0, 2 * math.pi, 201)
    values = np.sin(times)
    maximum = apiver_module.first_local_maximum(times, values)
    assert maximum.time == pytest.approx(math.pi / 2, abs=1e-5)
    assert maximum.value == pytest.approx(1.0, abs=1e-6)
    minimum = apiver_module.following_local_minimum(times, values, maximum.index)
    assert minimum.time == pytest.approx(3 * math.pi / 2, abs=1e-5)
    assert minimum.value == pytest.approx(-1.0, abs=1e-6)


def test_first_local_maximum__monotone_series(apiver_module):
    assert apiver_module.first_local_maximum([0.0, 1.0, 2.0], [0.0, 0.5, 0.7]) is None


def test_following_local_minimum__falls_back_to_last_sample(apiver_module):
    times = np.linspace(0.0, 3.0, 31)
    values = np.exp(-((times - 1.0) ** 2))
    minimum = apiver_module.following_local_minimum(times, values, after=10)
    assert minimum.index == 30
    assert minimum.value == values[-1]


def test_refine_argmax__recovers_parabola_vertex(apiver_module):
    xs = np.linspace(0.0, 1.0, 11)
    x, y = apiver_module.refine_argmax(xs, 2.0 - (xs - 0.37) ** 2)
    assert x == pytest.approx(0.37, abs=1e-10)
    assert y == pytest.approx(2.0, abs=1e-10)


def test_refine_argmax__boundary_maximum_is_not_refined(apiver_module, caplog):
    with caplog.at_level(logging.WARNING):
        assert apiver_module.refine_argmax([0.0, 1.0, 2.0], [3.0, 2.0, 1.0]) == (0.0, 3.0)
    assert "boundary" in caplog.text


# diffraction in time


@pytest.mark.parametrize("epsilon", [1.0, 0.5, 0.1])
def test_run_diffraction__universal_first_oscillation(apiver_module, diffraction_grid, epsilon):
    result = apiver_module.run_diffraction(
        apiver_module.SystemParams(epsilon=epsilon), apiver_module.Friction(), 1.0, 1.0, diffraction_grid
    )
    assert list(result.columns) == ["t", "xi", "rho", "rho_classical"]
    assert result.scalars["t0"] == pytest.approx(1.0)
    assert result.scalars["rho_at_t0"] == pytest.approx(0.25, abs=1e-9)
    assert result.scalars["first_oscillation_amplitude"] == pytest.approx(0.5921, abs=1e-3)
    scalars = result.scalars
    contrast = scalars["first_max_value"] + scalars["following_min_value"]
    assert scalars["first_oscillation_amplitude"] == scalars["first_max_value"] - scalars["following_min_value"]
    assert scalars["visibility"] == pytest.approx(scalars["first_oscillation_amplitude"] / contrast)
    assert scalars["visibility"] == pytest.approx(0.2756, abs=2e-3)
    assert result.scalars["rho_stationary"] == 1.0


def test_run_diffraction__first_maximum_moves_earlier_towards_classical(apiver_module, diffraction_grid):
    times = [
        apiver_module.run_diffraction(
            apiver_module.SystemParams(epsilon=epsilon), apiver_module.Friction(), 1.0, 1.0, diffraction_grid
        ).scalars["first_max_time"]
        for epsilon in (1.0, 0.5, 0.1)
    ]
    assert times[0] > times[1] > times[2] > 1.0


def test_run_diffraction__classical_regime_is_a_step(apiver_module, diffraction_grid):
    result = apiver_module.run_diffraction(
        apiver_module.SystemParams(epsilon=0.0), apiver_module.Friction(), 1.0, 1.0, diffraction_grid
    )
    times = result.columns["t"]
    np.testing.assert_array_equal(result.columns["rho"], (times >= 1.0).astype(float))
    np.testing.assert_array_equal(result.columns["rho"], result.columns["rho_classical"])
    assert np.isnan(result.columns["xi"]).all()
    assert result.scalars["first_oscillation_amplitude"] == 0.0
    assert "visibility" not in result.scalars


def test_run_diffraction__friction_damps_the_first_oscillation(apiver_module, diffraction_grid):
    amplitudes = [
        apiver_module.run_diffraction(
            apiver_module.SystemParams(), apiver_module.Friction(gamma_r=gamma), 1.0, 1.0, diffraction_grid
        ).scalars["first_oscillation_amplitude"]
        for gamma in (0.0, 0.05, 0.1, 0.15, 0.2)
    ]
    assert amplitudes[0] > amplitudes[1] > amplitudes[2] > 0.0
    assert np.all(np.diff(amplitudes) <= 0.0)
    # p / (m gamma) = 5 keeps the Fresnel argument below its first maximum
    assert amplitudes[-1] == 0.0


@pytest.mark.parametrize("gamma", [0.0, 0.1])
def test_run_diffraction__behind_the_shutter_has_no_arrival_time(apiver_module, gamma, caplog):
    grid = apiver_module.TimeGrid.span(5.0, dt=1e-2)
    with caplog.at_level(logging.WARNING):
        result = apiver_module.run_diffraction(
            apiver_module.SystemParams(), apiver_module.Friction(gamma_r=gamma), 1.0, -1.0, grid
        )
    assert "t0" not in result.scalars
    assert "rho_at_t0" not in result.scalars
    assert "t0 is absent" in caplog.text
    assert result.columns["rho"][0] == 1.0
    assert np.isfinite(result.columns["rho"]).all()


def test_diffraction_density__shutter_edge_at_time_zero(apiver_module, params):
    _, rho = apiver_module.diffraction_density(params, 0.0, 1.0, 0.0, [0.0, 1.0])
    assert rho[0] == 0.25
    _, rho = apiver_module.diffraction_density(params, 0.0, 1.0, -1.0, [0.0])
    assert rho[0] == 1.0


@pytest.mark.parametrize("p, t", [(0.0, [1.0]), (1.0, [-1.0])])
def test_diffraction_density__rejects_bad_arguments(apiver_module, params, p, t):
    with pytest.raises(apiver_module.InvalidParameterException):
        apiver_module.diffraction_density(params, 0.0, p, 1.0, t)


def test_stationary_diffraction_density(apiver_module, params):
    assert stationary_diffraction_density(params, 0.0, 1.0, 1.0) == 1.0
    _, late = apiver_module.diffraction_density(params, 0.2, 1.0, 1.0, [500.0])
    assert stationary_diffraction_density(params, 0.2, 1.0, 1.0) == pytest.approx(late[0], rel=1e-12)


def test_arrival_time():
    assert arrival_time(1.0, 0.0, 2.0, 3.0) == 1.5
    assert arrival_time(1.0, 0.1, 1.0, 1.0) == pytest.approx(-10.0 * math.log(0.9))
    assert arrival_time(1.0, 0.5, 1.0, 2.0) is None
    assert arrival_time(1.0, 0.0, 1.0, 0.0) == 0.0
    assert arrival_time(1.0, 0.0, 1.0, -1.0) is None
    assert arrival_time(1.0, 0.1, 1.0, -1.0) is None


# tunneling


def test_transmission_probability__starts_at_zero(apiver_module):
    assert apiver_module.transmission_probability(-10.0, 1.0, -10.0, 1.0) == 0.0
    assert apiver_module.transmission_probability(1e3, 1.0, -10.0, 1.0) == pytest.approx(1.0)


def test_run_tunneling__reaches_a_plateau(apiver_module, tunneling_grid):
    result = _tunneling(apiver_module, tunneling_grid)
    assert list(result.columns) == ["t", "x_t", "sigma", "transmission"]
    transmission = result.columns["transmission"]
    assert transmission[0] == 0.0
    late = result.columns["t"] > 50.0
    assert np.max(np.abs(transmission[late] - transmission[-1])) < 1e-3
    assert result.scalars["t_asymptotic"] == transmission[-1]
    assert result.metadata["width_variant"] == "kostin_scaled"


def test_run_tunneling__friction_and_classicality_lower_transmission(apiver_module, tunneling_grid):
    by_gamma = [
        _tunneling(apiver_module, tunneling_grid, gamma=fraction * 0.2).scalars["t_asymptotic"]
        for fraction in (0.0, 0.1, 0.2, 0.3)
    ]
    assert np.all(np.diff(by_gamma) <= 0.0)
    by_epsilon = [
        _tunneling(apiver_module, tunneling_grid, epsilon=epsilon).scalars["t_asymptotic"]
        for epsilon in (1.0, 0.5, 0.1)
    ]
    assert np.all(np.diff(by_epsilon) <= 0.0)


@pytest.mark.parametrize("epsilon", [1.0, 0.5, 0.1])
@pytest.mark.parametrize("gamma", [0.02, 0.04, 0.06])
def test_run_tunneling__kostin_transmits_at_least_as_much_as_ck(apiver_module, tunneling_grid, epsilon, gamma):
    kostin, ck = (
        _tunneling(apiver_module, tunneling_grid, epsilon=epsilon, gamma=gamma, variant=variant)
        for variant in ("kostin_scaled", "ck_scaled")
    )
    assert np.all(kostin.columns["transmission"] >= ck.columns["transmission"] - 1e-12)


def test_run_tunneling__rejects_other_width_variants(apiver_module, tunneling_grid):
    with pytest.raises(apiver_module.InvalidParameterException, match="kostin_scaled or ck_scaled"):
        _tunneling(apiver_module, tunneling_grid, variant="generalized_gamma_i")


def test_run_tunneling__packet_must_start_left_of_barrier(apiver_module, tunneling_grid):
    with pytest.raises(apiver_module.InvalidParameterException, match="x0"):
        apiver_module.run_tunneling(
            apiver_module.SystemParams(),
            apiver_module.Friction(),
            apiver_module.DrivenRepeller(),
            tunneling_grid,
            width_variant="kostin_scaled",
            x0=1.0,
        )


@pytest.mark.parametrize("gamma_fraction, low, high", [(0.3, 0.81, 0.91), (0.0, 0.98, 1.02)])
def test_run_tunneling__field_resonance(apiver_module, tunneling_grid, gamma_fraction, low, high):
    omega = 0.2
    result = apiver_module.run_tunneling(
        apiver_module.SystemParams(),
        apiver_module.Friction(gamma_r=gamma_fraction * omega),
        apiver_module.DrivenRepeller(e0=0.1, phi=-math.pi / 2, omega=omega),
        tunneling_grid,
        width_variant="kostin_scaled",
        scan=apiver_module.TunnelingScan.resonance(omega),
        threads=2,
    )
    assert list(result.columns) == ["scan_value", "t_asymptotic"]
    assert result.n_rows == 61
    assert low <= result.scalars["omega0_res_ratio"] <= high
    assert result.scalars["omega0_res"] == pytest.approx(result.scalars["omega0_res_ratio"] * omega)


def test_run_tunneling__stronger_field_at_resonance_transmits_more(apiver_module, tunneling_grid):
    omega = 0.2
    result = apiver_module.run_tunneling(
        apiver_module.SystemParams(),
        apiver_module.Friction(gamma_r=0.3 * omega),
        apiver_module.DrivenRepeller(omega0=0.86 * omega, phi=-math.pi / 2, omega=omega),
        tunneling_grid,
        width_variant="kostin_scaled",
        scan=apiver_module.TunnelingScan("e0", (0.08, 0.1, 0.12)),
    )
    assert np.all(np.diff(result.columns["t_asymptotic"]) >= 0.0)
    assert "argmax" in result.scalars


def test_run_tunneling__scan_matches_single_runs(apiver_module, tunneling_grid):
    scan = apiver_module.run_tunneling(
        apiver_module.SystemParams(),
        apiver_module.Friction(gamma_r=0.02),
        apiver_module.DrivenRepeller(),
        tunneling_grid,
        width_variant="ck_scaled",
        scan=apiver_module.TunnelingScan("epsilon", (1.0, 0.5)),
    )
    single = _tunneling(apiver_module, tunneling_grid, epsilon=0.5, gamma=0.02, variant="ck_scaled")
    assert scan.columns["t_asymptotic"][1] == single.scalars["t_asymptotic"]


def test_run_tunneling__trajectory_counting_follows_transmission(apiver_module, tunneling_grid):
    n = 2000
    result = apiver_module.run_tunneling(
        apiver_module.SystemParams(),
        apiver_module.Friction(),
        apiver_module.DrivenRepeller(),
        tunneling_grid,
        width_variant="kostin_scaled",
        n_bohm=n,
        streams=apiver_module.RandomStreams(master_seed=11),
    )
    assert result.columns["t_bohm"][0] == 0.0
    assert result.columns["t_bohm"][-1] == pytest.approx(result.scalars["t_asymptotic"], abs=4 * 0.5 / math.sqrt(n))
    assert result.metadata["seed"] == {"master_seed": 11, "stream_id": 0}


# Brownian motion


def test_run_brownian__columns_and_limits(apiver_module, streams):
    result = apiver_module.run_brownian(
        apiver_module.SystemParams(),
        apiver_module.Friction(gamma_r=0.2),
        apiver_module.Bath(kT=0.5),
        "kostin_scaled",
        apiver_module.TimeGrid.span(100.0, dt=1e-2, sample_every=500),
        200,
        streams=streams,
        threads=2,
    )
    columns = result.columns
    assert list(columns) == ["t", "msd_cl", "msd_q_analytic", "msd_q_mc", "d_cl", "d_q"]
    assert columns["d_cl"][0] == 0.0
    assert np.all(columns["d_q"][1:] > columns["d_cl"][1:])
    assert np.all(columns["msd_q_analytic"] >= columns["msd_cl"])
    assert result.scalars["d_einstein"] == pytest.approx(2.5)
    assert result.scalars["d_cl_asymptotic"] == pytest.approx(2.5, rel=0.02)
    assert result.scalars["d_cl_final"] == pytest.approx(2.5 * (1.0 - (1.0 - math.exp(-20.0)) / 20.0))
    assert columns["msd_q_mc"][-1] == pytest.approx(
        columns["msd_q_analytic"][-1], abs=4 * result.scalars["msd_q_mc_final_se"]
    )
    assert result.metadata["n_tra"] == 200


def test_run_brownian__soliton_width_adds_no_spreading(apiver_module, streams):
    params = apiver_module.SystemParams()
    result = apiver_module.run_brownian(
        params,
        apiver_module.Friction(gamma_r=0.2, gamma_i=apiver_module.soliton_gamma_i(1.0, 0.0)),
        apiver_module.Bath(kT=0.2),
        "generalized_gamma_i",
        apiver_module.TimeGrid.span(20.0, dt=1e-2, sample_every=100),
        20,
        streams=streams,
    )
    np.testing.assert_allclose(result.columns["msd_q_analytic"], result.columns["msd_cl"], atol=1e-12)
    np.testing.assert_allclose(result.columns["d_q"], result.columns["d_cl"], atol=1e-12)


def test_run_brownian__same_seed_same_result(apiver_module):
    def run(threads):
        return apiver_module.run_brownian(
            apiver_module.SystemParams(),
            apiver_module.Friction(gamma_r=0.2),
            apiver_module.Bath(kT=0.2),
            "ck_scaled",
            apiver_module.TimeGrid.span(5.0, dt=1e-2, sample_every=50),
            30,
            streams=apiver_module.RandomStreams(master_seed=42),
            threads=threads,
        )

    np.testing.assert_array_equal(run(1).columns["msd_q_mc"], run(3).columns["msd_q_mc"])


# early arrivals
# dt = 1e-2 instead of the 1e-3 default keeps these runs fast; the coarse step matches the default one
# to 1e-6 (see the coarse_step test).


@pytest.fixture
def barrier(apiver_module):
    return apiver_module.GaussianWindowRepeller(omega=1.5, g=1.0)


def test_barrier_time_scale(params):
    assert barrier_time_scale(params, 1.0) == 2.0
    assert barrier_time_scale(params, 0.5) == 0.5


def test_transmission_through_detector():
    np.testing.assert_allclose(transmission_through_detector(10.0, [10.0, 1e3, -1e3], 1.0), [0.5, 1.0, 0.0])


@pytest.mark.parametrize("gamma, expected", [(0.0, 5.0), (0.1, -10.0 * math.log(0.5))])
def test_run_early_arrivals__dissipative_run_uses_free_arrival_time(apiver_module, barrier, gamma, expected):
    result = apiver_module.run_early_arrivals(
        apiver_module.SystemParams(),
        apiver_module.Friction(gamma_r=gamma),
        apiver_module.Bath(),
        barrier,
        10.0,
        apiver_module.TimeGrid.span(40.0, dt=1e-2, sample_every=100),
        1000,
    )
    assert result.scalars["t_barrier"] == pytest.approx(expected)
    assert result.metadata["n_tra"] == 1
    np.testing.assert_array_equal(result.columns["p_tr_difference_se"], 0.0)
    assert result.columns["p_tr_free"][0] == result.columns["p_tr_barrier"][0]


def test_run_early_arrivals__coarse_step_matches_default_step(apiver_module, barrier):
    def run(dt, sample_every):
        return apiver_module.run_early_arrivals(
            apiver_module.SystemParams(),
            apiver_module.Friction(gamma_r=0.1),
            apiver_module.Bath(),
            barrier,
            10.0,
            apiver_module.TimeGrid.span(20.0, dt=dt, sample_every=sample_every),
            1,
        )

    coarse = run(1e-2, 100)
    fine = run(1e-3, 1000)
    np.testing.assert_allclose(coarse.columns["t"], fine.columns["t"], atol=1e-12)
    for name in ("p_tr_barrier", "p_tr_free"):
        np.testing.assert_allclose(coarse.columns[name], fine.columns[name], atol=1e-6)


def test_run_early_arrivals__free_path_must_reach_the_origin(apiver_module, barrier):
    with pytest.raises(apiver_module.ArrivalConditionException):
        apiver_module.run_early_arrivals(
            apiver_module.SystemParams(),
            apiver_module.Friction(gamma_r=0.2),
            apiver_module.Bath(),
            barrier,
            10.0,
            apiver_module.TimeGrid.span(10.0, dt=1e-2),
            1,
        )


def test_run_early_arrivals__explicit_barrier_time_wins(apiver_module, barrier, caplog):
    with caplog.at_level(logging.WARNING):
        result = apiver_module.run_early_arrivals(
            apiver_module.SystemParams(),
            apiver_module.Friction(gamma_r=0.2),
            apiver_module.Bath(),
            barrier,
            10.0,
            apiver_module.TimeGrid.span(10.0, dt=1e-2, sample_every=10),
            1,
            t_barrier=4.0,
        )
    assert result.scalars["t_barrier"] == 4.0
    assert "never arrives" in caplog.text


def test_run_early_arrivals__thermal_run(apiver_module, barrier, streams):
    result = apiver_module.run_early_arrivals(
        apiver_module.SystemParams(),
        apiver_module.Friction(gamma_r=0.1),
        apiver_module.Bath(kT=2.0),
        barrier,
        10.0,
        apiver_module.TimeGrid.span(40.0, dt=1e-2, sample_every=100),
        200,
        streams=streams,
        threads=2,
    )
    columns = result.columns
    assert list(columns) == ["t", "p_tr_barrier", "p_tr_free", "p_tr_difference", "p_tr_difference_se"]
    assert result.scalars["t_barrier"] == 6.0
    np.testing.assert_allclose(columns["p_tr_difference"], columns["p_tr_barrier"] - columns["p_tr_free"], atol=1e-12)
    assert columns["p_tr_difference_se"][-1] > 0.0
    assert result.metadata["n_tra"] == 200
    assert result.metadata["barrier"]["t_b"] == 6.0


@pytest.mark.slow
def test_run_early_arrivals__barrier_gives_early_arrivals(apiver_module, barrier):
    def run(kT):
        return apiver_module.run_early_arrivals(
            apiver_module.SystemParams(),
            apiver_module.Friction(gamma_r=0.1),
            apiver_module.Bath(kT=kT),
            barrier,
            10.0,
            apiver_module.TimeGrid.span(40.0, dt=1e-2, sample_every=100),
            10_000,
            streams=apiver_module.RandomStreams(master_seed=8),
            threads=4,
        )

    warm = run(2.0)
    excess = warm.columns["p_tr_difference"] - 3.0 * warm.columns["p_tr_difference_se"]
    assert np.any(excess > 0.0)
    assert run(10.0).scalars["p_tr_barrier_asymptotic"] >= warm.scalars["p_tr_barrier_asymptotic"]
