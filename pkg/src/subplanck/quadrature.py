"""Quadrature rules tuned to Gaussian-damped phase-space integrands.

All phase-space integrals here reduce to either

* radial-angular form: integral of d2mu/pi f(mu) = (1/2pi) int dtheta
  int_0^inf dx f(sqrt(x) e^{i theta}) with x = |mu|^2, handled by
  Gauss-Laguerre in x times a uniform angular rule, or
* plain-plane form handled by tensor Gauss-Hermite.

The Gauss-Laguerre weights are stored with the e^{+x} factor folded in
(``w_scaled = w * exp(x)``) so rules can be applied to the *full*
integrand, exponential decay included, without overflow at high node
counts.  ``w_scaled`` is computed from the Laguerre-function recurrence
rather than ``w * exp(x)`` directly, which survives node counts where
the bare weights underflow.
"""

from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import roots_hermite


@lru_cache(maxsize=64)
def gauss_laguerre_scaled(n):
    """Nodes x_j and scaled weights W_j = w_j e^{x_j} of the n-point rule.

    Sum_j W_j g(x_j) integrates int_0^inf g(x) dx exactly when
    g(x) = e^{-x} p(x) with p a polynomial of degree <= 2n-1.  Nodes come
    from the Golub-Welsch tridiagonal eigenproblem, which stays stable at
    orders where polynomial root refinement overflows.
    """
    x = eigh_tridiagonal(2.0 * np.arange(n) + 1.0, np.arange(1.0, n), eigvals_only=True)
    # W_j = x_j / ((n+1) L_{n+1}(x_j) e^{-x_j/2})^2, via the recurrence for
    # lam_k = L_k(x) e^{-x/2}.  lam_0 underflows for far nodes of large
    # rules, so carry a per-node log rescaling; lam_{n+1} itself is O(1).
    log_scale = -x / 2
    lam_prev = np.ones_like(x)
    lam = 1.0 - x
    for k in range(1, n + 1):
        lam, lam_prev = ((2 * k + 1 - x) * lam - k * lam_prev) / (k + 1), lam
        big = np.abs(lam) > 1e120
        if np.any(big):
            lam = np.where(big, lam * 1e-120, lam)
            lam_prev = np.where(big, lam_prev * 1e-120, lam_prev)
            log_scale = np.where(big, log_scale + np.log(1e120), log_scale)
    log_w = np.log(x) - 2.0 * (np.log(np.abs(lam)) + log_scale) - 2.0 * np.log(n + 1.0)
    w = np.exp(log_w)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def radial_rule(c, n):
    """Nodes/weights integrating int_0^inf h(x) dx for h = e^{-c x} * poly.

    Exact for polynomial degree <= 2n-1.  Evaluate h itself at the nodes;
    its own exponential decay is part of the integrand.
    """
    if c <= 0:
        raise ValueError("decay rate c must be positive")
    x, w = gauss_laguerre_scaled(n)
    return x / c, w / c


def polar_rule(c, n_radial, n_angular):
    """Rule for int (d2mu/pi) h(mu) with h ~ e^{-c |mu|^2} * polynomial.

    Returns (x, theta, wx, wtheta): evaluate h at mu = sqrt(x) e^{i theta}
    and contract with the outer product of the weights.  Exact when the
    radial polynomial degree is <= 2 n_radial - 1 and angular harmonics
    stay below n_angular.
    """
    x, wx = radial_rule(c, n_radial)
    theta = 2 * np.pi * np.arange(n_angular) / n_angular
    wtheta = np.full(n_angular, 1.0 / n_angular)
    return x, theta, wx, wtheta


@lru_cache(maxsize=32)
def gauss_hermite(n):
    """Standard Gauss-Hermite nodes/weights (weight e^{-z^2})."""
    z, w = roots_hermite(n)
    z.setflags(write=False)
    w.setflags(write=False)
    return z, w
