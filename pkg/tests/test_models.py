import math

import numpy as np
import pytest

import switchsde as s
from switchsde.models import U_CLASSES, SamplingPlan, check_assumptions


def quick_plan(**kw):
    defaults = dict(n_pairs=1500, n_rate_pairs=48, max_regime=10, seed=4)
    defaults.update(kw)
    return SamplingPlan(**defaults)


def test_switching_ou_passes_everything(ou_model):
    rep = check_assumptions(ou_model, quick_plan())
    assert rep.failed() == []


def test_degenerate_regime_fails_only_ellipticity():
    rep = check_assumptions(s.zoo("degenerate_regime"), quick_plan())
    assert rep.failed() == ["uniform_ellipticity"]
    assert rep["uniform_ellipticity"].witness is not None


def test_zero_diffusion_regime_kills_ellipticity():
    m = s.zoo("switching_ou", beta=(1.0, 1.0), a=(0.0, 0.0), s=(0.0, 1.0))
    rep = check_assumptions(m, quick_plan())
    assert not rep.passed("uniform_ellipticity")


def test_quadratic_rates_break_regime_linear_bound():
    def rate(x, i, j):
        return float(i * i) if j == i + 1 else 0.0
    q = s.QMatrixSpec(rate=rate, kappa=1, linear_bound_alpha=5.0,
                      state_independent=True)
    m = s.ModelSpec(dim=1, drift=lambda t, x, i: -np.asarray(x, dtype=float),
                    diffusion=lambda t, x, i: 1.0, q=q,
                    growth_c=lambda t: 1.0,
                    dissipativity_c=lambda t, i: 1.0,
                    diffusion_mod_c=lambda t, i: 1.0,
                    ellipticity_lambda=lambda t: 1.0, model_id="quad_rates")
    rep = check_assumptions(m, quick_plan(max_regime=20))
    res = rep["rate_regime_linear"]
    assert not res.passed
    assert res.witness["i"] > 5  # i^2 > 5 i only beyond i = 5


def test_every_zoo_model_passes_advertised_subset():
    for name in ("switching_ou", "degenerate_regime", "birth_death_switch",
                 "nonlipschitz_log"):
        m = s.zoo(name)
        rep = check_assumptions(m, quick_plan())
        failed = set(rep.failed())
        assert failed.isdisjoint(m.advertised), (name, failed & m.advertised)


def test_zoo_unknown_name():
    with pytest.raises(ValueError, match="unknown zoo model"):
        s.zoo("no_such_model")


def test_linear_coeffs_agree_with_callbacks():
    rng = np.random.default_rng(0)
    for name in ("switching_ou", "degenerate_regime", "birth_death_switch"):
        m = s.zoo(name)
        assert m.linear_coeffs is not None
        regs = np.array([1, 2, 1, 2], dtype=np.int64)
        X = rng.normal(size=(4, m.dim))
        beta, a, sig = m.linear_coeffs(regs)
        for r in range(4):
            b_cb = np.asarray(m.drift(0.0, X[r], int(regs[r])), dtype=float)
            assert np.allclose(b_cb, a[r] - beta[r] * X[r])
            s_cb = m.diffusion(0.0, X[r], int(regs[r]))
            assert float(s_cb) == pytest.approx(float(sig[r]))


# --- modulus classes ----------------------------------------------------------

def test_u_one_identity():
    u = U_CLASSES["one"]
    assert u.phi(0.7) == pytest.approx(0.7)
    assert u.gamma == 1.0
    # equality in the domination: phi(s) = s = gamma * s * u(s)^2
    for sv in (0.1, 1.0, 7.0):
        assert u.phi(sv) == pytest.approx(u.gamma * sv * float(u.u(sv)) ** 2)


def test_u_log_closed_form_vs_quadrature():
    u = U_CLASSES["log"]
    for sv in (1e-6, 1e-3, 0.1, 0.5, 1.0, 3.0):
        assert u.phi(sv) == pytest.approx(u.phi_quadrature(sv), abs=1e-10)


def test_u_log_gamma_domination_on_grid():
    u = U_CLASSES["log"]
    for sv in np.logspace(-9, 2, 300):
        assert u.phi(sv) <= u.gamma * sv * float(u.u(sv)) ** 2 + 1e-12


def test_u_log_reciprocal_mass_diverges_on_log_grid():
    u = U_CLASSES["log"]
    masses = [s.reciprocal_mass(u.u, eps) for eps in (1e-2, 1e-4, 1e-8, 1e-16)]
    assert all(b > a + 0.3 for a, b in zip(masses, masses[1:]))


def test_u_log_values():
    u = U_CLASSES["log"]
    assert float(u.u(1.0)) == 1.0
    assert float(u.u(5.0)) == 1.0
    assert float(u.u(math.exp(-2))) == pytest.approx(3.0)


# --- misc model helpers --------------------------------------------------------

def test_apply_diffusion_shapes():
    dw = np.array([1.0, 2.0])
    assert np.allclose(s.apply_diffusion(0.5, dw), [0.5, 1.0])
    m = np.array([[1.0, 1.0], [0.0, 2.0]])
    assert np.allclose(s.apply_diffusion(m, dw), m @ dw)
    stack = np.stack([np.eye(2), 2 * np.eye(2)])
    dws = np.stack([dw, dw])
    out = s.apply_diffusion(stack, dws)
    assert np.allclose(out, [dw, 2 * dw])


def test_linear_switching_model_validates_lengths():
    with pytest.raises(ValueError):
        s.linear_switching_model(beta=(1.0, 2.0), a=(0.0,), s=(1.0, 1.0))
