import numpy as np
import pytest

from src.models.fcs_result import FcsResult
from src.services.fcs_service import FcsService, _richardson, dominant_eigenvalue
from src.services.lindblad_service import LindbladService


def test_untilted_generator_is_the_liouvillian(qutrit):
    fcs = FcsService(qutrit)
    np.testing.assert_array_equal(fcs.tilted_liouvillian("0", 0.0), LindbladService(qutrit).assemble_liouvillian())


def test_lambda_vanishes_at_zero(fridge):
    curve = dict(FcsService(fridge).lambda_curve("2", [-1.0, -0.5, 0.0, 0.5, 1.0]))
    assert curve[0.0] == pytest.approx(0.0, abs=1e-10)


def test_lambda_curve_is_convex(two_qubit):
    chis = np.linspace(-0.5, 0.5, 21)
    values = np.array([value for _, value in FcsService(two_qubit).lambda_curve("1", chis)])
    assert np.all(np.diff(values, 2) > -1e-12)


def test_counting_field_is_bounded(qubit):
    with pytest.raises(ValueError):
        FcsService(qubit).lambda_curve("bath", [1.5])


def test_numeric_and_perturbative_cumulants_agree(qutrit):
    fcs = FcsService(qutrit)
    for label in ("0", "1"):
        result = fcs.cumulants_numeric(label)
        J, var = fcs.cumulants_perturbative(label)
        assert result.J_num == pytest.approx(J, rel=1e-8)
        assert result.Var_num == pytest.approx(var, rel=1e-6)


def test_fridge_currents_share_their_variance(fridge):
    fcs = FcsService(fridge)
    variances = [fcs.cumulants_numeric(label).Var_num for label in ("1", "2", "3")]
    assert variances[1] == pytest.approx(variances[0], rel=1e-6)
    assert variances[2] == pytest.approx(variances[0], rel=1e-6)


def test_zero_photon_reservoir_has_no_fluctuations(spectator):
    J, var = FcsService(spectator).cumulants_perturbative("side")
    assert abs(J) < 1e-10
    assert abs(var) < 1e-10


def test_richardson_removes_even_orders():
    exact = 3.0
    estimates = [exact + 2.0 * h**2 - 5.0 * h**4 for h in (1e-1, 5e-2, 2.5e-2)]
    value, residual = _richardson(estimates)
    assert value == pytest.approx(exact, abs=1e-12)
    assert residual < 1e-4


def test_dominant_eigenvalue_of_stochastic_generator():
    generator = np.array([[-1.0, 2.0], [1.0, -2.0]])
    assert dominant_eigenvalue(generator, 0.0) == pytest.approx(0.0, abs=1e-14)


def test_result_json_round_trip(qubit):
    result = FcsService(qubit).cumulants_numeric("bath")
    restored = FcsResult.from_dict(result.to_dict())
    assert restored == result
    assert restored.lambda_samples[0] == result.lambda_samples[0]
