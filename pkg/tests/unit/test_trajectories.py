import math

import numpy as np
import pytest


@pytest.fixture
def grid(apiver_module):
    return apiver_module.TimeGrid.span(10.0, dt=1e-2, sample_every=10)


@pytest.fixture
def q_path(apiver_module, grid):
    t = grid.times()
    return apiver_module.Path(grid, -2.0 + t, np.ones_like(t))


@pytest.fixture
def sigma_path(apiver_module, grid):
    t = grid.times()
    sigma = np.sqrt(1.0 + t**2 / 4.0)
    return apiver_module.Path(grid, sigma, t / (4.0 * sigma))


def test_dressing_trajectory__center_and_one_width_away(apiver_module, q_path, sigma_path):
    center = apiver_module.dressing_trajectory(-2.0, q_path, sigma_path)
    np.testing.assert_array_equal(center.values, q_path.values)
    edge = apiver_module.dressing_trajectory(-1.0, q_path, sigma_path)
    np.testing.assert_allclose(edge.values, q_path.values + sigma_path.values)
    np.testing.assert_allclose(edge.derivatives, q_path.derivatives + sigma_path.derivatives)


def test_dressing_trajectory__array_gives_one_row_per_start(apiver_module, q_path, sigma_path):
    starts = np.array([-3.0, -2.5, 0.0])
    dressed = apiver_module.dressing_trajectory(starts, q_path, sigma_path)
    assert dressed.values.shape == (3, len(q_path))
    np.testing.assert_array_equal(dressed.values[:, 0], starts)
    # the gap between two trajectories scales with the width
    np.testing.assert_allclose(dressed.values[2] - dressed.values[0], 3.0 * sigma_path.values)


def test_dressing_trajectory__rejects_mismatched_grids(apiver_module, q_path):
    other = apiver_module.TimeGrid.span(10.0, dt=1e-2, sample_every=20)
    with pytest.raises(apiver_module.GridMismatchException):
        apiver_module.dressing_trajectory(0.0, q_path, apiver_module.Path(other, np.ones(other.n_samples)))


def test_dressing_trajectory__rejects_non_positive_width(apiver_module, grid, q_path):
    with pytest.raises(apiver_module.InvalidParameterException, match="positive"):
        apiver_module.dressing_trajectory(0.0, q_path, apiver_module.Path(grid, np.zeros(grid.n_samples)))


def test_velocity_field__moves_particles_along_their_trajectories(apiver_module, q_path, sigma_path):
    dressed = apiver_module.dressing_trajectory(np.array([-4.0, 0.5]), q_path, sigma_path)
    times = q_path.times
    for row in dressed.values:
        velocity = apiver_module.velocity_field(row, times, q_path, sigma_path)
        finite_difference = np.gradient(row, times)
        np.testing.assert_allclose(velocity[1:-1], finite_difference[1:-1], atol=2e-3)


def test_velocity_field__interpolates_between_samples(apiver_module, q_path, sigma_path):
    v = apiver_module.velocity_field(-2.0 + 0.05, 0.05, q_path, sigma_path)
    assert float(v) == pytest.approx(1.0)


def test_velocity_field__needs_derivatives(apiver_module, grid, q_path):
    with pytest.raises(apiver_module.InvalidParameterException, match="derivatives"):
        apiver_module.velocity_field(0.0, 1.0, q_path, apiver_module.Path(grid, np.ones(grid.n_samples)))


def test_sample_initial_positions__born_statistics(apiver_module, streams):
    positions = apiver_module.sample_initial_positions(20_000, -5.0, 2.0, streams)
    assert positions.mean() == pytest.approx(-5.0, abs=4 * 2.0 / math.sqrt(20_000))
    assert positions.std() == pytest.approx(2.0, rel=0.03)
    np.testing.assert_array_equal(
        apiver_module.sample_initial_positions(5, -5.0, 2.0, streams, first_index=100), positions[100:105]
    )


@pytest.mark.parametrize("n, sigma0", [(0, 1.0), (10, 0.0)])
def test_sample_initial_positions__rejects_bad_arguments(apiver_module, streams, n, sigma0):
    with pytest.raises(apiver_module.InvalidParameterException):
        apiver_module.sample_initial_positions(n, 0.0, sigma0, streams)


def test_build_ensemble__non_crossing_and_provenance(apiver_module, q_path, sigma_path, streams):
    ensemble = apiver_module.build_ensemble(500, q_path, sigma_path, streams)
    assert len(ensemble) == 500
    assert ensemble.seed_provenance == {"master_seed": 20240517, "stream_id": 0}
    assert apiver_module.is_non_crossing(ensemble)
    assert ensemble.as_path().values.shape == (500, len(q_path))


def test_is_non_crossing__detects_crossing(apiver_module, grid):
    t = grid.times()
    trajectories = np.stack([-1.0 + t, 1.0 - t])
    ensemble = apiver_module.TrajectoryEnsemble(grid, np.array([-1.0, 1.0]), trajectories)
    assert not apiver_module.is_non_crossing(ensemble)


def test_trajectory_ensemble__checks_shape(apiver_module, grid):
    with pytest.raises(apiver_module.InvalidParameterException, match="shape"):
        apiver_module.TrajectoryEnsemble(grid, np.zeros(2), np.zeros((3, grid.n_samples)))


def test_msd_classical_analytic__frictionless_limit(apiver_module):
    t = np.array([0.0, 0.5, 1.0, 4.0])
    np.testing.assert_allclose(apiver_module.msd_classical_analytic(2.0, 1.0, 0.0, t), 2.0 * t**2)
    np.testing.assert_allclose(apiver_module.msd_classical_analytic(2.0, 1.0, 1e-9, t), 2.0 * t**2, rtol=1e-8)


def test_msd_classical_analytic__einstein_slope(apiver_module):
    kT, mass, gamma = 1.0, 1.0, 0.2
    msd = apiver_module.msd_classical_analytic(kT, mass, gamma, np.array([200.0, 400.0]))
    assert (msd[1] - msd[0]) / 200.0 == pytest.approx(2.0 * kT / (mass * gamma), rel=1e-10)


def test_diffusion_coefficients(apiver_module, sigma_path):
    t = sigma_path.times[1:]
    coefficients = apiver_module.diffusion_coefficients(1.0, 1.0, 0.2, sigma_path, t)
    expected = apiver_module.msd_classical_analytic(1.0, 1.0, 0.2, t) / (2 * t)
    np.testing.assert_allclose(coefficients.classical, expected)
    assert np.all(coefficients.quantum >= coefficients.classical)
    np.testing.assert_allclose(
        coefficients.quantum - coefficients.classical,
        (sigma_path.values[1:] - 1.0) ** 2 / (2 * t),
        rtol=1e-12,
        atol=1e-14,
    )


def test_diffusion_coefficients__reject_zero_time(apiver_module, sigma_path):
    with pytest.raises(apiver_module.InvalidParameterException, match="t > 0"):
        apiver_module.diffusion_coefficients(1.0, 1.0, 0.2, sigma_path, [0.0, 1.0])


def test_msd_monte_carlo__resting_centers_and_soliton_width(apiver_module, grid):
    centers = apiver_module.Path(grid, np.zeros((4, grid.n_samples)))
    sigma = apiver_module.Path(grid, np.ones(grid.n_samples))
    estimate = apiver_module.msd_monte_carlo(centers, [0.3, -1.0, 2.0, 0.1], sigma)
    np.testing.assert_array_equal(estimate.mean, 0.0)
    np.testing.assert_array_equal(estimate.standard_error, 0.0)


def test_msd_monte_carlo__spreading_only(apiver_module, grid, sigma_path):
    centers = apiver_module.Path(grid, np.zeros((3, grid.n_samples)))
    born = np.array([1.0, -2.0, 0.5])
    estimate = apiver_module.msd_monte_carlo(centers, born, sigma_path)
    np.testing.assert_allclose(estimate.mean, np.mean(born**2) * (sigma_path.values - 1.0) ** 2)


def test_msd_monte_carlo__soliton_width_averages_center_displacements(apiver_module, grid):
    t = grid.times()
    q = np.stack([0.1 * t, -0.3 * t, 0.2 * t**2])
    sigma = apiver_module.Path(grid, np.full(grid.n_samples, 0.7))
    estimate = apiver_module.msd_monte_carlo(apiver_module.Path(grid, q), [5.0, -1.0, 2.0], sigma)
    np.testing.assert_allclose(estimate.mean, np.mean(q**2, axis=0))
    np.testing.assert_allclose(estimate.standard_error, np.std(q**2, axis=0, ddof=1) / math.sqrt(3))


def test_msd_monte_carlo__single_trajectory_has_no_error_bar(apiver_module, grid, q_path, sigma_path):
    estimate = apiver_module.msd_monte_carlo(q_path, [-2.0], sigma_path)
    np.testing.assert_allclose(estimate.mean, grid.times() ** 2)
    np.testing.assert_array_equal(estimate.standard_error, 0.0)


def test_msd_monte_carlo__checks_sample_count(apiver_module, q_path, sigma_path):
    with pytest.raises(apiver_module.InvalidParameterException, match="Born samples"):
        apiver_module.msd_monte_carlo(q_path, [0.0, 1.0], sigma_path)


def test_transmitted_fraction_and_crossing_transmission(apiver_module, grid):
    t = grid.times()
    starts = np.array([-3.0, -2.0, -1.0, 4.0])
    trajectories = starts[:, np.newaxis] + t
    ensemble = apiver_module.TrajectoryEnsemble(grid, starts, trajectories)
    fraction = apiver_module.transmitted_fraction(ensemble, 0.0)
    assert fraction[0] == 0.25
    assert fraction[-1] == 1.0
    crossing = apiver_module.crossing_transmission(ensemble, 0.0)
    assert crossing[0] == 0.0
    assert crossing[-1] == 1.0
    assert np.all(np.diff(crossing) >= 0)
    with pytest.raises(apiver_module.InvalidParameterException, match="no trajectory"):
        apiver_module.crossing_transmission(ensemble, -10.0)


def test_critical_initial_position__its_trajectory_sits_on_the_detector(apiver_module, q_path, sigma_path):
    critical = apiver_module.critical_initial_position(q_path, sigma_path, 3.0)
    for k in (0, 17, len(q_path) - 1):
        dressed = apiver_module.dressing_trajectory(critical[k], q_path, sigma_path)
        assert dressed.values[k] == pytest.approx(3.0)


def test_critical_initial_position__counts_transmitted_particles(apiver_module, q_path, sigma_path, streams):
    ensemble = apiver_module.build_ensemble(2000, q_path, sigma_path, streams)
    critical = apiver_module.critical_initial_position(q_path, sigma_path, 1.0)
    beyond = (ensemble.initial_positions[:, np.newaxis] > critical).mean(axis=0)
    np.testing.assert_array_equal(beyond, apiver_module.transmitted_fraction(ensemble, 1.0))
