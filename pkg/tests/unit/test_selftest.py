import pytest

from scaled_trajectories._internal.selftest import (
    CHECKS,
    STATIC_CENTER_POTENTIALS,
    _static_center_error,
    check_center_static,
)


def test_static_center_potentials__are_static():
    assert all(pot.is_static for pot in STATIC_CENTER_POTENTIALS)


@pytest.mark.parametrize("pot", STATIC_CENTER_POTENTIALS, ids=lambda pot: pot.tag)
def test_static_center_error__matches_closed_form(apiver_module, pot):
    grid = apiver_module.TimeGrid.span(10.0, dt=1e-2)
    state = apiver_module.GaussianState(q=-10.0, q_dot=1.0)
    assert _static_center_error(pot, apiver_module.Friction(gamma_r=0.06), state, grid) < 1e-7


def test_static_center_error__rejects_time_dependent_field(apiver_module):
    field = apiver_module.DrivenRepeller(e0=0.1, omega0=0.17)
    with pytest.raises(apiver_module.InvalidParameterException, match="time-dependent"):
        _static_center_error(
            field, apiver_module.Friction(), apiver_module.GaussianState(), apiver_module.TimeGrid.span(1.0)
        )


def test_check_center_static():
    result = check_center_static()
    assert result.passed, result.detail
    assert result.name == "center and velocity, static potentials"
    assert check_center_static in CHECKS
