import numpy as np
import pytest

import switchsde as s


@pytest.fixture(scope="session")
def three_state_q():
    """Constant-rate three-regime spec matching the documented layout example."""
    rates = {(1, 2): 1.0, (1, 3): 2.0, (2, 1): 2.0, (2, 3): 1.0,
             (3, 1): 1.0, (3, 2): 1.0}
    return s.QMatrixSpec(rate=lambda x, i, j: rates.get((i, j), 0.0),
                         kappa=2, lipschitz_cq=0.0, linear_bound_alpha=3.0,
                         state_independent=True, n_regimes=3)


@pytest.fixture(scope="session")
def scalar_rate_q():
    """Two regimes, q12(x) = x1 (state-dependent), q21 = 1."""
    def rate(x, i, j):
        if i == 1 and j == 2:
            return float(np.atleast_1d(x)[0])
        if i == 2 and j == 1:
            return 1.0
        return 0.0
    return s.QMatrixSpec(rate=rate, kappa=1, lipschitz_cq=1.0,
                         linear_bound_alpha=2.0, linear_bound_beta=1.0,
                         n_regimes=2)


@pytest.fixture(scope="session")
def ou_model():
    return s.zoo("switching_ou", dim=1, beta=(1.0, 2.0), a=(0.0, 0.0),
                 s=(1.0, 1.0))


@pytest.fixture(scope="session")
def frozen_model():
    """Single regime, no switching, no motion."""
    return s.linear_switching_model(dim=1, beta=(0.0,), a=(0.0,), s=(0.0,),
                                    rates=np.zeros((1, 1)),
                                    model_id="still")
