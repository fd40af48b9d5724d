"""Shared nonlinear least-squares plumbing used by the fitting modules."""

from __future__ import annotations

import numpy as np
from scipy.optimize import least_squares


class FitError(RuntimeError):
    """A fit could not be set up or did not converge."""


def run_least_squares(residual, x0, bounds=(-np.inf, np.inf), **kwargs):
    """Damped least squares with Jacobian-based scaling; raises FitError."""
    result = least_squares(residual, np.asarray(x0, dtype=float),
                           bounds=bounds, x_scale="jac", **kwargs)
    if not result.success:
        raise FitError(f"least-squares did not converge: {result.message}")
    return result


def covariance(result, n_points: int) -> np.ndarray:
    """Parameter covariance from the Jacobian at the solution.

    Scales inv(J^T J) by the reduced chi-square estimate
    2*cost/(n_points - n_params).  Columns are equilibrated before the
    pseudo-inverse so parameters of wildly different magnitude (Hz vs V)
    do not shadow each other; genuinely unconstrained directions still
    come back with zero instead of spuriously huge variance.
    """
    dof = max(n_points - result.x.size, 1)
    s_sq = 2.0 * result.cost / dof
    jac = np.atleast_2d(result.jac)
    scale = np.linalg.norm(jac, axis=0)
    scale[scale == 0.0] = 1.0
    jtj = (jac / scale).T @ (jac / scale)
    return (np.linalg.pinv(jtj) / np.outer(scale, scale)) * s_sq


def stderr(result, n_points: int) -> np.ndarray:
    """1-sigma standard errors of the fitted parameters."""
    return np.sqrt(np.clip(np.diag(covariance(result, n_points)), 0.0, None))
