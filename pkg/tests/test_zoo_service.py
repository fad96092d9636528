import math

import numpy as np
import pytest

from src.core.errors import ConfigError, InvalidModel
from src.models.global_mapping import GlobalMapping
from src.services.steady_state_service import SteadyStateService
from src.services.tur_service import TurService
from src.services.zoo_service import ZooService, driven_qutrit, global_to_local, three_qubit_fridge


@pytest.fixture
def zoo():
    return ZooService()


def test_families(zoo):
    assert zoo.families() == ["fridge", "qubit", "qutrit", "qutrit-global", "two-qubit"]


@pytest.mark.parametrize("family", ["qubit", "two-qubit", "qutrit", "fridge", "qutrit-global"])
def test_defaults_build_and_validate(zoo, family):
    model = zoo.build(family)
    assert model.meta["family"] == family
    assert SteadyStateService(model).lindblad.validation.passed


def test_unknown_family_and_parameters(zoo):
    with pytest.raises(ConfigError):
        zoo.build("ladder")
    with pytest.raises(ConfigError):
        zoo.build("qubit", {"p1": 1.0})
    with pytest.raises(ConfigError):
        zoo.build("two-qubit", {"delta": 0.1})


def test_qubit_r0_alias(zoo):
    model = zoo.build("qubit", {"r0": 0.4})
    assert model.reservoir("bath").R == pytest.approx(0.7)


def test_p_ratio_alias(zoo):
    model = zoo.build("qutrit", {"p0": 2.0, "p_ratio": 0.25})
    assert model.reservoir("1").p == pytest.approx(0.5)


@pytest.mark.parametrize("family", ["qubit", "two-qubit", "qutrit", "fridge"])
@pytest.mark.parametrize("ratio", [0.2, 0.5, 0.9])
def test_coupling_for_ratio(zoo, family, ratio):
    model = zoo.build(family, {"r_ratio": ratio})
    report = SteadyStateService(model).steady_report()
    assert report.r / report.r0 == pytest.approx(ratio, rel=1e-8)
    assert model.meta["params"]["r_ratio"] == ratio


def test_fridge_requires_resonance():
    with pytest.raises(InvalidModel):
        three_qubit_fridge((1.0, 2.5, 2.0), p=(1.0, 1.0, 1.0), R=(0.3, 0.2, 0.4), g=0.1)


def test_qutrit_ordering_flags():
    engine = driven_qutrit((1.0, 0.5, 0.0), 1.0, 1.0, 0.3, 0.4, g=0.1, omega_d=0.5)
    mixed = driven_qutrit((1.0, 0.0, 0.5), 1.0, 1.0, 0.3, 0.7, g=0.1, omega_d=1.0)
    assert engine.meta["same_side"]
    assert not mixed.meta["same_side"]
    assert engine.meta["same_side_occupations"]
    assert not mixed.meta["same_side_occupations"]


@pytest.mark.parametrize("seed", range(10))
def test_reference_values_match_generic_solvers(zoo, seed):
    rng = np.random.default_rng(seed)
    draws = {
        "qubit": {"p": rng.uniform(0.2, 2.0), "R": rng.uniform(0.05, 0.45)},
        "two-qubit": {
            "p1": rng.uniform(0.2, 2.0), "p2": rng.uniform(0.2, 2.0),
            "R1": rng.uniform(0.55, 0.95), "R2": rng.uniform(0.05, 0.45),
        },
        "qutrit": {
            "p0": rng.uniform(0.2, 2.0), "p1": rng.uniform(0.2, 2.0),
            "R0": rng.uniform(0.55, 0.95), "R1": rng.uniform(0.05, 0.45),
        },
    }
    for family, params in draws.items():
        model = zoo.build(family, {**params, "g": rng.uniform(0.05, 0.8)})
        reference = zoo.reference_values(model)
        report = SteadyStateService(model).steady_report()
        assert report.gamma == pytest.approx(reference["gamma"], rel=1e-8)
        assert report.p_I == pytest.approx(reference["p_I"], rel=1e-8)
        assert report.thermal.P == pytest.approx(reference["P"], rel=1e-8)
        np.testing.assert_allclose(report.thermal.populations, reference["tau"], rtol=1e-8)


def test_fridge_reference_values(zoo, fridge):
    reference = zoo.reference_values(fridge)
    report = SteadyStateService(fridge).steady_report()
    assert report.gamma == pytest.approx(reference["gamma"])
    assert report.r0 == pytest.approx(reference["r0"], rel=1e-10)
    np.testing.assert_allclose(report.thermal.populations, reference["tau"], rtol=1e-10)


def test_global_mapping_without_coupling():
    mapping, model = global_to_local((1.2, 1.0, 0.0), g=0.0, omega_d=0.9, R0=0.3, R1=0.2)
    assert mapping.theta == 0.0
    assert mapping.g_tilde == 0.0
    assert mapping.delta_tilde == pytest.approx(1.2 - 1.0 - 0.9)
    np.testing.assert_allclose(mapping.eps, [1.2, 1.0, 0.0])
    assert model.g == 0.0


def test_global_mapping_at_degeneracy():
    mapping, model = global_to_local((1.0, 1.0, 0.0), g=0.2, omega_d=0.8, R0=0.3, R1=0.2)
    assert mapping.theta == pytest.approx(math.pi / 4)
    assert mapping.g_tilde == pytest.approx(0.4)
    assert mapping.delta_tilde == pytest.approx(0.4)
    assert model.delta == pytest.approx(mapping.delta_tilde)
    assert model.meta["family"] == "qutrit-global"


@pytest.mark.parametrize("seed", range(50))
def test_global_mapping_invariants(seed):
    rng = np.random.default_rng(seed)
    E = (rng.uniform(1.1, 1.5), rng.uniform(0.6, 1.0), 0.0)
    g, omega_d = rng.uniform(0.05, 0.3), rng.uniform(0.1, 0.8)
    mapping, model = global_to_local(E, g=g, omega_d=omega_d, R0=0.6, R1=0.2)
    split = math.sqrt((E[0] - E[1]) ** 2 + 4 * g**2)
    assert math.tan(2 * mapping.theta) == pytest.approx(2 * g / (E[0] - E[1]))
    np.testing.assert_allclose(mapping.eps[:2], [(E[0] + E[1] + split) / 2, (E[0] + E[1] - split) / 2])
    assert mapping.g_tilde == pytest.approx(0.5 * omega_d * math.sin(2 * mapping.theta))
    assert GlobalMapping.from_dict(mapping.to_dict()) == mapping

    local = driven_qutrit(mapping.eps, 1.0, 1.0, 0.6, 0.2, g=mapping.g_tilde, omega_d=omega_d * math.cos(2 * mapping.theta))
    assert local.delta == pytest.approx(mapping.delta_tilde)
    assert TurService(model).uncertainty().Q == pytest.approx(TurService(local).uncertainty().Q, rel=1e-10)


def test_global_mapping_from_temperatures():
    _, model = global_to_local((1.2, 1.0, 0.0), g=0.1, omega_d=0.9, T0=2.0, T1=0.5)
    gap = model.energies[0] - model.energies[2]
    assert model.reservoir("0").R == pytest.approx(1.0 / (1.0 + math.exp(gap / 2.0)))


def test_global_mapping_needs_occupations():
    with pytest.raises(ConfigError):
        global_to_local((1.2, 1.0, 0.0), g=0.1, omega_d=0.9, R0=0.3)
