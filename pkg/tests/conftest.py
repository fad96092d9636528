import numpy as np
import pytest

from src.models.model_spec import ModelSpec
from src.models.reservoir import Reservoir
from src.services.zoo_service import (
    ZooService,
    driven_qubit,
    driven_qutrit,
    three_qubit_fridge,
    two_qubit_transport,
)
from src.utils.superop_utils import ket_bra


@pytest.fixture
def qubit():
    return driven_qubit(p=1.0, R=0.3, g=0.25, delta=0.0)


@pytest.fixture
def detuned_qubit():
    return driven_qubit(p=1.0, R=0.3, g=0.25, delta=1.0)


@pytest.fixture
def two_qubit():
    return two_qubit_transport(p1=1.0, p2=0.6, R1=0.7, R2=0.3, g=0.2)


@pytest.fixture
def qutrit():
    return driven_qutrit((1.0, 0.0, 0.5), p0=1.0, p1=0.8, R0=0.3, R1=0.7, g=0.3, omega_d=1.0)


@pytest.fixture
def fridge():
    return three_qubit_fridge((1.0, 3.0, 2.0), p=(1.0, 0.7, 0.5), R=(0.3, 0.2, 0.4), g=0.2)


@pytest.fixture
def spectator():
    """Qubit transition with a third level hanging off level 1 through its own reservoir."""
    return ModelSpec(
        dim=3,
        energies=[1.0, 0.0, 2.0],
        vq=(0, 1),
        g=0.3,
        omega_d=1.0,
        reservoirs=[
            Reservoir(label="bath", p=1.0, R=0.3, gamma_op=ket_bra(3, 1, 0)),
            Reservoir(label="side", p=0.7, R=0.4, gamma_op=ket_bra(3, 2, 1)),
        ],
    )


@pytest.fixture
def disconnected():
    return ModelSpec(
        dim=3,
        energies=[1.0, 0.0, 2.0],
        vq=(0, 1),
        g=0.3,
        omega_d=1.0,
        reservoirs=[Reservoir(label="bath", p=1.0, R=0.3, gamma_op=ket_bra(3, 1, 0))],
    )


@pytest.fixture
def rng():
    return np.random.default_rng(7)


RANDOM_DRAWS = {
    "qubit": lambda rng: {"p": rng.uniform(0.2, 2.0), "R": rng.uniform(0.05, 0.45), "delta": rng.uniform(-1.0, 1.0)},
    "two-qubit": lambda rng: {
        "p1": rng.uniform(0.2, 2.0), "p2": rng.uniform(0.2, 2.0),
        "R1": rng.uniform(0.55, 0.95), "R2": rng.uniform(0.05, 0.45),
    },
    "qutrit": lambda rng: {
        "p0": rng.uniform(0.2, 2.0), "p1": rng.uniform(0.2, 2.0),
        "R0": rng.uniform(0.55, 0.95), "R1": rng.uniform(0.05, 0.45), "delta": rng.uniform(-1.0, 1.0),
    },
    # R2 well below R1 and R3 keeps r0 >= 0.03
    "fridge": lambda rng: {
        "p1": rng.uniform(0.2, 2.0), "p2": rng.uniform(0.2, 2.0), "p3": rng.uniform(0.2, 2.0),
        "R1": rng.uniform(0.3, 0.45), "R2": rng.uniform(0.02, 0.1), "R3": rng.uniform(0.3, 0.45),
    },
}


@pytest.fixture
def random_model():
    """Seeded draw from one of the bundled families."""
    zoo = ZooService()

    def draw(family: str, seed: int) -> ModelSpec:
        rng = np.random.default_rng(seed)
        params = RANDOM_DRAWS[family](rng)
        return zoo.build(family, {**params, "g": rng.uniform(0.05, 0.8)})

    return draw
