import math

import pydantic
import pytest


@pytest.mark.parametrize(
    "epsilon, hbar_tilde",
    [
        (1.0, 1.0),
        (0.25, 0.5),
        (0.0, 0.0),
    ],
)
def test_validate_params__hbar_tilde(apiver_module, epsilon, hbar_tilde):
    bundle = apiver_module.validate_params({"mass": 1.0, "hbar": 1.0, "epsilon": epsilon})
    assert bundle.params.hbar_tilde == pytest.approx(hbar_tilde)
    assert bundle.friction == apiver_module.Friction()
    assert bundle.state is None


@pytest.mark.parametrize(
    "params, message",
    [
        ({"epsilon": 1.5}, "epsilon"),
        ({"mass": 0.0}, "mass"),
        ({"hbar": -1.0}, "hbar"),
    ],
)
def test_validate_params__rejects_out_of_range(apiver_module, params, message):
    with pytest.raises(apiver_module.InvalidParameterException, match=message):
        apiver_module.validate_params(params)


def test_validate_params__rejects_negative_kt_and_sigma(apiver_module):
    with pytest.raises(apiver_module.InvalidParameterException, match="kT"):
        apiver_module.validate_params(bath={"kT": -0.1})
    with pytest.raises(apiver_module.InvalidParameterException, match="sigma"):
        apiver_module.validate_params(state={"sigma": 0.0})


def test_validate_params__accepts_models(apiver_module):
    params = apiver_module.SystemParams(epsilon=0.5)
    bundle = apiver_module.validate_params(params, apiver_module.Friction(gamma_r=0.1, gamma_i=-0.5))
    assert bundle.params == params
    assert bundle.friction.gamma_i == -0.5
    assert not bundle.friction.is_real


def test_system_params__hbar_tilde_is_monotonic(apiver_module):
    values = [apiver_module.SystemParams(hbar=2.0, epsilon=eps).hbar_tilde for eps in (0.0, 0.1, 0.5, 1.0)]
    assert values == sorted(values)
    assert values[-1] ** 2 == pytest.approx(4.0)
    assert apiver_module.SystemParams(hbar=2.0, epsilon=0.3).hbar_tilde ** 2 == pytest.approx(0.3 * 4.0)


def test_models__are_frozen(apiver_module):
    params = apiver_module.SystemParams()
    with pytest.raises(pydantic.ValidationError):
        params.mass = 2.0  # type: ignore[misc]


def test_bath__activity(apiver_module):
    assert apiver_module.Bath(kT=0.5).is_active
    assert not apiver_module.Bath(kT=0.0).is_active
    assert not apiver_module.Bath(kT=0.5, kind="none").is_active


def test_eval_potential__free(apiver_module):
    assert apiver_module.eval_potential(apiver_module.ConstantPotential.free(), 3.0, 7.0) == (0.0, 0.0, 0.0)


def test_eval_potential__driven_repeller(apiver_module):
    pot = apiver_module.DrivenRepeller(charge=-1.0, e0=0.0, omega=0.2, mass=1.0)
    value = apiver_module.eval_potential(pot, 1.0, 0.0)
    assert value.value == pytest.approx(-0.02)
    assert value.gradient == pytest.approx(-0.04)
    assert value.curvature == pytest.approx(-0.04)
    assert pot.is_static


def test_eval_potential__gaussian_window_at_center(apiver_module):
    pot = apiver_module.GaussianWindowRepeller(omega=1.5, mass=1.0, t_b=6.0)
    assert apiver_module.eval_potential(pot, 1.0, 6.0).curvature == pytest.approx(-2.25)
    assert abs(pot.v2(20.0)) < 1e-80
    assert not pot.is_static


def test_eval_potential__driven_field(apiver_module):
    pot = apiver_module.DrivenRepeller(charge=-1.0, e0=0.1, omega0=0.5, phi=0.3, omega=0.2)
    assert pot.v1(2.0) == pytest.approx(-0.1 * math.cos(1.0 + 0.3))
    assert not pot.is_static
    with pytest.raises(apiver_module.InvalidParameterException):
        pot.static_coefficients()


@pytest.mark.parametrize("step", [1e-3, 0.5, 10.0])
def test_eval_potential__second_difference_is_curvature(apiver_module, step):
    pot = apiver_module.ConstantPotential(c0=0.3, c1=-1.25, c2=0.75)
    x = 0.4
    second = (
        apiver_module.eval_potential(pot, x + step, 0.0).value
        - 2 * apiver_module.eval_potential(pot, x, 0.0).value
        + apiver_module.eval_potential(pot, x - step, 0.0).value
    ) / step**2
    assert second == pytest.approx(0.75, rel=1e-6)


def test_build_potential__by_tag(apiver_module):
    pot = apiver_module.build_potential("gaussian_window_repeller", omega=1.5, g=2.0, t_b=3.0)
    assert isinstance(pot, apiver_module.GaussianWindowRepeller)
    assert pot.g == 2.0
    assert set(apiver_module.POTENTIALS_REGISTRY.keys()) == {
        "constant",
        "driven_repeller",
        "gaussian_window_repeller",
    }


def test_build_potential__unknown_tag(apiver_module):
    with pytest.raises(apiver_module.InvalidParameterException, match="unknown potential"):
        apiver_module.build_potential("double_well")


def test_build_potential__invalid_field(apiver_module):
    with pytest.raises(apiver_module.InvalidParameterException, match="g"):
        apiver_module.build_potential("gaussian_window_repeller", g=-1.0)
