"""Finite-chain transition probabilities by uniformization.

This is the closed-form oracle the Monte Carlo checks are compared against:
``exp(t Q)`` computed as a Poisson-weighted sum of powers of the uniformized
kernel ``M = I + Q / lam``. All powers of a (sub)stochastic matrix stay in
[0, 1], so truncating the Poisson series at total tail mass ``tol`` bounds
every entry error by ``tol`` -- no squaring tricks, no norm estimates.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from .errors import InvalidModelError

DEFAULT_DIM_CAP = 512


def transition_matrix(generator, t: float, *, tol: float = 1e-12,
                      dim_cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Stochastic matrix ``exp(t * Q)`` for a conservative generator ``Q``.

    Entries are accurate to ``tol`` absolutely; rows sum to 1 up to the
    truncated Poisson tail. Raises on negative ``t``, on dimensions above
    ``dim_cap`` and on structurally invalid generators.
    """
    Q = np.asarray(generator, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ValueError(f"generator must be square, got shape {Q.shape}")
    n = Q.shape[0]
    if n > dim_cap:
        raise ValueError(f"generator dimension {n} exceeds cap {dim_cap}")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if not np.all(np.isfinite(Q)):
        raise InvalidModelError("generator contains non-finite entries")
    off = Q - np.diag(np.diag(Q))
    if off.min() < -1e-12:
        i, j = np.unravel_index(np.argmin(off), off.shape)
        raise InvalidModelError(f"negative off-diagonal rate at ({i + 1}, {j + 1})")
    scale = max(1.0, float(np.abs(Q).max()))
    rows = Q.sum(axis=1)
    if np.abs(rows).max() > 1e-9 * scale:
        k = int(np.argmax(np.abs(rows)))
        raise InvalidModelError(f"generator is not conservative: row {k + 1} "
                                f"sums to {rows[k]:.3e}")

    lam = float(np.max(-np.diag(Q)))
    mu = lam * t
    if mu == 0.0:
        return np.eye(n)

    M = np.eye(n) + Q / lam
    np.clip(M, 0.0, None, out=M)

    log_mu = np.log(mu)
    out = np.zeros_like(M)
    power = np.eye(n)
    cum = 0.0
    k = 0
    k_cap = int(mu + 40.0 * np.sqrt(mu + 1.0) + 200)
    while cum < 1.0 - tol and k <= k_cap:
        w = np.exp(k * log_mu - mu - gammaln(k + 1))
        if w > 0.0:
            out += w * power
        cum += w
        power = power @ M
        k += 1
    return out


def holding_probability(spec, k: int, t) -> np.ndarray:
    """P(no jump up to t) lower envelope from a dominating chain spec:
    ``exp(-(min(kappa, k-1) + kappa) * alpha * K * t)``."""
    t = np.asarray(t, dtype=float)
    out = np.exp(-spec.exit_rate(k) * t)
    return out if out.ndim else float(out)
