import numpy as np
import pytest

from src.core.errors import CarnotLimit, ZeroCurrent
from src.models.tur_report import TurReport
from src.services.fcs_service import FcsService
from src.services.tur_service import TurService
from src.services.zoo_service import (
    ZooService,
    driven_qubit,
    driven_qutrit,
    three_qubit_fridge,
    two_qubit_transport,
)
from src.utils import closed_forms


def test_qubit_matches_closed_forms(qubit):
    service = TurService(qubit)
    steady = service.steady.steady_report()
    report = service.uncertainty(steady)
    assert report.Q_d == pytest.approx(closed_forms.qubit_q_d(steady.r0, steady.r), rel=1e-8)
    assert report.Q_c == pytest.approx(closed_forms.qubit_q_c(steady.r0, steady.r), rel=1e-8)
    assert report.Q == pytest.approx(report.Q_d + report.Q_c)
    assert report.reservoir == "bath"


def test_currents_follow_photon_counts(fridge):
    report = TurService(fridge).uncertainty()
    assert report.J["1"] == pytest.approx(-report.J_c)
    assert report.J["2"] == pytest.approx(report.J_c)
    assert report.J["3"] == pytest.approx(-report.J_c)


def test_entropy_production_is_non_negative(two_qubit, qutrit, fridge):
    for model in (two_qubit, qutrit, fridge):
        report = TurService(model).uncertainty()
        assert report.sigma >= 0.0
        assert report.Q_d >= 2.0 - 1e-8


def test_uncertainty_is_reservoir_independent(two_qubit):
    report = TurService(two_qubit).uncertainty()
    per_reservoir = [report.sigma * report.variance(label) / report.J[label] ** 2 for label in ("1", "2")]
    assert per_reservoir[0] == pytest.approx(per_reservoir[1], rel=1e-8)
    assert per_reservoir[0] == pytest.approx(report.Q, rel=1e-8)


@pytest.mark.parametrize("delta, sign", [(0.0, -1), (0.2, -1), (1.0, 1)])
def test_coherent_sign_follows_detuning(delta, sign):
    # gamma = 1/2 for p = 1
    report = TurService(driven_qubit(p=1.0, R=0.3, g=0.25, delta=delta)).uncertainty()
    assert np.sign(report.Q_c) == sign


def test_zero_photon_reservoir_carries_nothing(spectator):
    report = TurService(spectator).uncertainty()
    assert report.J["side"] == 0.0
    assert report.var_d["side"] == report.var_c["side"] == 0.0
    assert report.reservoir == "bath"


def test_zero_coupling_has_no_uncertainty(qubit):
    with pytest.raises(ZeroCurrent):
        TurService(qubit.with_g(0.0)).uncertainty()


def test_carnot_point_raises():
    with pytest.raises(CarnotLimit):
        TurService(driven_qubit(p=1.0, R=0.5, g=0.25)).uncertainty()


@pytest.mark.parametrize(
    "model",
    [
        driven_qubit(p=1.0, R=0.3, g=0.25),
        driven_qubit(p=1.0, R=0.3, g=0.4, delta=0.7),
        two_qubit_transport(1.0, 0.6, 0.8, 0.35, g=0.3),
        driven_qutrit((1.0, 0.0, 0.5), 1.0, 0.8, 0.3, 0.7, g=0.3, omega_d=0.9),
        three_qubit_fridge((1.0, 3.0, 2.0), (1.0, 0.7, 0.5), (0.3, 0.2, 0.4), g=0.2),
    ],
)
def test_closed_form_cumulants_match_oracle(model):
    report = TurService(model).uncertainty()
    fcs = FcsService(model)
    result = fcs.cumulants_numeric(report.reservoir)
    assert result.J_num == pytest.approx(report.J[report.reservoir], rel=1e-6)
    assert result.Var_num == pytest.approx(report.variance(report.reservoir), rel=1e-5)


FAMILIES = ["qubit", "two-qubit", "qutrit", "fridge"]


@pytest.mark.slow
@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("seed", range(25))
def test_random_models_match_oracle(random_model, family, seed):
    model = random_model(family, seed)
    report = TurService(model).uncertainty()
    result = FcsService(model).cumulants_numeric(report.reservoir)
    assert result.J_num == pytest.approx(report.J[report.reservoir], rel=1e-6)
    assert result.Var_num == pytest.approx(report.variance(report.reservoir), rel=1e-5)


@pytest.mark.slow
@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("seed", range(10))
def test_random_counterparts_reproduce_diagonal_part(random_model, family, seed):
    service = TurService(random_model(family, seed))
    steady = service.steady.steady_report()
    report = service.uncertainty(steady)
    twin = TurService(service.classical_counterpart(steady.diagonal))
    twin_steady = twin.steady.steady_report()
    np.testing.assert_allclose(twin_steady.diagonal.q, steady.diagonal.q, atol=1e-10)
    assert twin_steady.p_c == pytest.approx(steady.p_c, rel=1e-10)
    twin_report = twin.uncertainty(twin_steady)
    for label, current in report.J.items():
        assert twin_report.J[label] == pytest.approx(current, rel=1e-8)
    assert twin_report.Q_c == 0.0
    assert twin_report.Q == pytest.approx(report.Q_d, rel=1e-8)


def test_classical_counterpart_reproduces_diagonal_part(qutrit):
    service = TurService(qutrit)
    report = service.uncertainty()
    counterpart = service.classical_counterpart()
    assert counterpart.g == 0.0
    assert counterpart.reservoir("c").effective
    assert service.counterpart_uncertainty() == pytest.approx(report.Q_d, rel=1e-6)


def test_counterpart_current_variance(qubit):
    service = TurService(qubit)
    steady = service.steady.steady_report()
    fcs = FcsService(service.classical_counterpart(steady.diagonal))
    J_c = steady.p_c * steady.r / 2
    J, var = fcs.cumulants_perturbative("c")
    assert J == pytest.approx(J_c, rel=1e-8)
    assert var == pytest.approx(0.5 * steady.p_c * steady.diagonal.qsum - 2 * J_c**2 * steady.xi.trace, rel=1e-6)


def test_two_qubit_symmetric_optimum():
    model = ZooService().build("two-qubit", {"R1": 0.8, "R2": 0.35, "r_ratio": 3.0 / 8.0})
    report = TurService(model).uncertainty()
    assert report.Q == pytest.approx(closed_forms.two_qubit_symmetric_q_min(0.8, 0.35), rel=1e-8)


@pytest.mark.parametrize(
    "params, Q",
    [
        ({"r0": 0.835}, 1.76),
        ({"R1": 0.5, "R2": 0.5 - 0.259}, 1.98),
    ],
)
def test_two_qubit_symmetric_optimum_values(params, Q):
    model = ZooService().build("two-qubit", {"p1": 1.0, "p2": 1.0, **params, "r_ratio": 3.0 / 8.0})
    report = TurService(model).uncertainty()
    assert report.Q == pytest.approx(Q, abs=0.01)
    R1, R2 = model.reservoir("1").R, model.reservoir("2").R
    assert report.Q == pytest.approx(closed_forms.two_qubit_symmetric_q_min(R1, R2), rel=1e-8)


def test_report_json_round_trip(fridge):
    report = TurService(fridge).uncertainty()
    assert TurReport.from_dict(report.to_dict()) == report
    assert list(report.csv_row()) == ["J_c", "sigma", "var_d", "var_c", "Q_d", "Q_c", "Q"]
