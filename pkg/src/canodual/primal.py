"""Primal objective: evaluation, canonical measure, duality map, derivatives.

The nonlinearity enters only through the quadratic measures
xi_i = 1/2 x'Q_i x and eta_i = 1/2 x'B_i x; every formula below is written
in terms of them. The log-sum-exp block is evaluated with the usual
max-shift so that neither the value nor the constitutive weights overflow:
the implicit leading "1" inside the log contributes the exponent 0, which
is included in the shift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DualPoint, ProblemInstance


@dataclass(frozen=True)
class CanonicalMeasure:
    """Quadratic measures (xi, eta) of a point."""

    xi: np.ndarray
    eta: np.ndarray


def canonical_measure(inst: ProblemInstance, x: np.ndarray) -> CanonicalMeasure:
    x = np.asarray(x, dtype=float).ravel()
    xi = 0.5 * (inst.Q_stack @ x) @ x if inst.p else np.zeros(0)
    eta = 0.5 * (inst.B_stack @ x) @ x if inst.r else np.zeros(0)
    return CanonicalMeasure(xi=xi, eta=eta)


def _shifted_exponentials(inst: ProblemInstance, xi: np.ndarray):
    """Return (shift, exp(-shift), exp(a - shift)) for a = beta (xi + d).

    shift = max(0, max_i a_i), so every exponential is <= 1.
    """
    a = inst.beta * (xi + inst.d)
    s = max(0.0, float(a.max())) if a.size else 0.0
    return s, np.exp(-s), np.exp(a - s)


def eval_lse(inst: ProblemInstance, x: np.ndarray) -> float:
    """Smoothed max term (1/beta) log[1 + sum_i exp(beta (xi_i + d_i))]."""
    xi = canonical_measure(inst, x).xi
    s, e0, ea = _shifted_exponentials(inst, xi)
    return (s + np.log(e0 + ea.sum())) / inst.beta


def eval_quartic(inst: ProblemInstance, x: np.ndarray) -> float:
    """Quartic penalty sum_i (alpha_i/2) (eta_i + c_i)^2."""
    eta = canonical_measure(inst, x).eta
    return float(np.sum(0.5 * inst.alpha * (eta + inst.c) ** 2))


def eval_primal(inst: ProblemInstance, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float).ravel()
    quad = 0.5 * float(x @ inst.A @ x) - float(inst.f @ x)
    return quad + eval_lse(inst, x) + eval_quartic(inst, x)


def duality_map(inst: ProblemInstance, x: np.ndarray) -> DualPoint:
    """Constitutive dual point zeta(x).

    tau is the softmax weight of each log-sum-exp exponent against the
    implicit unit term (computed from the same shifted exponentials as
    :func:`eval_lse`, so the two agree to machine precision);
    sigma_i = alpha_i (eta_i + c_i).
    """
    cm = canonical_measure(inst, x)
    s, e0, ea = _shifted_exponentials(inst, cm.xi)
    tau = ea / (e0 + ea.sum()) if inst.p else np.zeros(0)
    sigma = inst.alpha * (cm.eta + inst.c) if inst.r else np.zeros(0)
    return DualPoint(tau=tau, sigma=sigma)


def measure_jacobian(inst: ProblemInstance, x: np.ndarray) -> np.ndarray:
    """n x m matrix whose columns are the measure gradients
    Q_1 x, ..., Q_p x, B_1 x, ..., B_r x."""
    x = np.asarray(x, dtype=float).ravel()
    cols = []
    if inst.p:
        cols.append((inst.Q_stack @ x).T)
    if inst.r:
        cols.append((inst.B_stack @ x).T)
    if not cols:
        return np.zeros((inst.n, 0))
    return np.column_stack(cols) if len(cols) > 1 else cols[0]


def weight_hessian(inst: ProblemInstance, tau: np.ndarray) -> np.ndarray:
    """Block-diagonal curvature of the canonical potential at the measure:
    beta (diag(tau) - tau tau') on the log-sum-exp block, diag(alpha) on the
    quartic block."""
    m = inst.m
    D = np.zeros((m, m))
    p = inst.p
    if p:
        D[:p, :p] = inst.beta * (np.diag(tau) - np.outer(tau, tau))
    if inst.r:
        D[p:, p:] = np.diag(inst.alpha)
    return D


def grad_primal(inst: ProblemInstance, x: np.ndarray) -> np.ndarray:
    """Gradient G(zeta(x)) x - f with the constitutive zeta(x)."""
    x = np.asarray(x, dtype=float).ravel()
    z = duality_map(inst, x)
    return inst.curvature(z.tau, z.sigma) @ x - inst.f


def hess_primal(inst: ProblemInstance, x: np.ndarray) -> np.ndarray:
    """Hessian G(zeta(x)) + F D F' (symmetric by construction)."""
    x = np.asarray(x, dtype=float).ravel()
    z = duality_map(inst, x)
    G = inst.curvature(z.tau, z.sigma)
    F = measure_jacobian(inst, x)
    D = weight_hessian(inst, z.tau)
    H = G + F @ D @ F.T
    return 0.5 * (H + H.T)
