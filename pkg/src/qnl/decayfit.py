"""Coherence-decay models and fits: relaxation, Ramsey, CPMG.

The CPMG decay model is

    P_e(tau) = p0 + a * exp(-tau/(2 T1)) * exp(-(tau/T_phi)^(alpha+1)),

where the pulse-induced loss exp(-chi_P) is folded into the fitted
amplitude a (only the product is identifiable from a single trace).
T2 of a CPMG trace is defined as the time where the total coherence
factor exp(-tau/2T1 - (tau/T_phi)^stretch) reaches 1/e.  The dephasing
times of a sequence family scale as T_phi ~ N^beta with
beta = alpha/(1+alpha) for 1/f^alpha noise, which fit_scaling inverts.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .fitutil import FitError, run_least_squares, stderr

_KINDS = ("relaxation", "ramsey", "echo", "cpmg")

STRETCH_BOUNDS = (0.5, 4.0)


@dataclass(frozen=True)
class DecayTrace:
    """A measured decay: excited-state population versus delay.

    times       : delays (s), strictly increasing
    populations : P_e per delay; values in [-0.1, 1.1] (measurement noise
                  may push estimates slightly outside [0, 1])
    kind        : one of "relaxation", "ramsey", "echo", "cpmg"
    n_pulses    : pi-pulse count (0 for relaxation/ramsey, 1 for echo,
                  >= 1 for cpmg)
    """

    times: np.ndarray
    populations: np.ndarray
    kind: str
    n_pulses: int = 0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        pops = np.asarray(self.populations, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "populations", pops)
        if times.ndim != 1 or times.shape != pops.shape:
            raise ValueError("times and populations must be 1-d and "
                             "equal length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any((pops < -0.1) | (pops > 1.1)):
            raise ValueError("populations outside the [-0.1, 1.1] tolerance")
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        if self.kind == "echo" and self.n_pulses == 0:
            object.__setattr__(self, "n_pulses", 1)
        expected = {"relaxation": 0, "ramsey": 0, "echo": 1}
        if self.kind in expected and self.n_pulses != expected[self.kind]:
            raise ValueError(f"{self.kind} trace must have "
                             f"n_pulses={expected[self.kind]}")
        if self.kind == "cpmg" and self.n_pulses < 1:
            raise ValueError("cpmg trace needs n_pulses >= 1")


@dataclass(frozen=True)
class CoherenceFit:
    """Fitted decay parameters; unused entries stay None.

    t1        : relaxation time (s)
    t2        : 1/e total-coherence time (s)
    t_phi     : pure dephasing time (s)
    stretch   : dephasing exponent alpha+1
    amplitude : a (with any pulse-induced loss folded in)
    offset    : p0
    detuning  : Ramsey fringe frequency (Hz)
    phase     : Ramsey fringe phase (rad)
    errors    : 1-sigma standard errors keyed by field name
    flags     : quality flags, e.g. "low_confidence", "stretch_at_bound"
    """

    amplitude: float
    offset: float
    t1: float | None = None
    t2: float | None = None
    t_phi: float | None = None
    stretch: float = 1.0
    detuning: float | None = None
    phase: float | None = None
    errors: dict = field(default_factory=dict)
    flags: tuple = ()

    def __post_init__(self):
        for name in ("t1", "t2", "t_phi"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be positive when set")
        if not self.stretch > 0:
            raise ValueError("stretch must be positive")


@dataclass(frozen=True)
class ScalingFit:
    """Power-law scaling T_phi ~ N^beta and the implied noise exponent.

    alpha = beta/(1-beta); finite and positive only for 0 < beta < 1.
    """

    beta: float
    alpha: float
    beta_err: float
    alpha_err: float

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")


class ScalingError(RuntimeError):
    """T_phi-vs-N slope outside (0, 1); carries the fitted beta."""

    def __init__(self, message: str, beta: float, beta_err: float):
        super().__init__(message)
        self.beta = beta
        self.beta_err = beta_err


def fit_relaxation(trace: DecayTrace) -> CoherenceFit:
    """Fit P_e(t) = p0 + a*exp(-t/T1) to a relaxation trace.

    Needs >= 5 points.  A fitted T1 above 100x the trace span is flagged
    "low_confidence" (the trace does not constrain it).
    """
    if trace.kind != "relaxation":
        raise ValueError("fit_relaxation expects a relaxation trace")
    t, y = trace.times, trace.populations
    if len(t) < 5:
        raise FitError("need at least 5 points")

    p0_0 = y[-1]
    a_0 = y[0] - y[-1]
    t1_0 = _efold_guess(t, y, p0_0, a_0)

    def residual(p):
        p0, a, t1 = p
        return p0 + a * np.exp(-t / t1) - y

    result = run_least_squares(residual, [p0_0, a_0, t1_0],
                               bounds=([-np.inf, -np.inf, 1e-300],
                                       [np.inf, np.inf, np.inf]))
    p0, a, t1 = result.x
    errs = stderr(result, len(t))
    flags = ()
    # T1 is unconstrained when it dwarfs the trace span or when there is
    # no decaying signal to begin with
    span = np.ptp(y)
    if t1 > 100.0 * t[-1] or abs(a) <= max(3.0 * errs[1], 1e-6 * max(span,
                                                                     1.0)):
        flags = ("low_confidence",)
    return CoherenceFit(amplitude=float(a), offset=float(p0), t1=float(t1),
                        errors={"offset": errs[0], "amplitude": errs[1],
                                "t1": errs[2]},
                        flags=flags)


def fit_ramsey(trace: DecayTrace) -> CoherenceFit:
    """Fit decaying fringes p0 + a*exp(-t/T2)*cos(2 pi f t + phi0).

    Needs >= 10 points; for an identifiable detuning the trace should span
    at least two fringe periods.  The detuning is initialized from the
    dominant FFT bin of the mean-subtracted signal; when no oscillation is
    detected the fit falls back to a pure-exponential envelope with a
    warning and flags the detuning as unconstrained.
    """
    if trace.kind != "ramsey":
        raise ValueError("fit_ramsey expects a ramsey trace")
    t, y = trace.times, trace.populations
    if len(t) < 10:
        raise FitError("need at least 10 points")

    dt = float(np.median(np.diff(t)))
    spectrum = np.abs(np.fft.rfft(y - y.mean())) ** 2
    spectrum[0] = 0.0
    freqs = np.fft.rfftfreq(len(t), dt)
    k = int(np.argmax(spectrum))
    # a pure decaying envelope concentrates power in the first bin; a
    # resolvable fringe (>= 2 periods in the span) peaks at bin >= 2
    oscillating = (len(spectrum) > 3 and k >= 2
                   and spectrum[k] > 5.0 * np.median(spectrum[1:]))

    if not oscillating:
        warnings.warn("no oscillation detected; falling back to a pure "
                      "exponential envelope fit")
        p0_0, a_0 = y[-1], y[0] - y[-1]
        t2_0 = _efold_guess(t, y, p0_0, a_0)

        def residual_env(p):
            p0, a, t2 = p
            return p0 + a * np.exp(-t / t2) - y

        result = run_least_squares(residual_env, [p0_0, a_0, t2_0],
                                   bounds=([-np.inf, -np.inf, 1e-300],
                                           [np.inf, np.inf, np.inf]))
        p0, a, t2 = result.x
        errs = stderr(result, len(t))
        return CoherenceFit(amplitude=float(a), offset=float(p0),
                            t2=float(t2),
                            errors={"offset": errs[0], "amplitude": errs[1],
                                    "t2": errs[2]},
                            flags=("no_oscillation",
                                   "detuning_unconstrained"))

    f_0 = freqs[k]
    phi_0 = float(np.angle(np.fft.rfft(y - y.mean())[k]))
    a_0 = float(np.sqrt(2.0) * np.std(y))
    p0_0 = float(y.mean())
    t2_0 = (t[-1] - t[0]) / 2.0

    def residual(p):
        p0, a, t2, f, phi = p
        return p0 + a * np.exp(-t / t2) * np.cos(2 * np.pi * f * t + phi) - y

    result = run_least_squares(
        residual, [p0_0, a_0, t2_0, f_0, phi_0],
        bounds=([-np.inf, 0.0, 1e-300, 0.0, -2 * np.pi],
                [np.inf, np.inf, np.inf, 1.5 * freqs[-1], 2 * np.pi]))
    p0, a, t2, f, phi = result.x
    errs = stderr(result, len(t))
    flags = ()
    if abs(a) < 1e-3 * max(abs(p0), 1e-30):
        flags = ("detuning_unconstrained",)
    return CoherenceFit(amplitude=float(a), offset=float(p0), t2=float(t2),
                        detuning=float(f),
                        phase=float(np.remainder(phi + np.pi, 2 * np.pi)
                                    - np.pi),
                        errors={"offset": errs[0], "amplitude": errs[1],
                                "t2": errs[2], "detuning": errs[3],
                                "phase": errs[4]},
                        flags=flags)


def cpmg_decay_model(fit: CoherenceFit, t1: float, tau):
    """Evaluate the CPMG decay model at delay tau (scalar or array).

    P_e = offset + amplitude * exp(-tau/(2 t1)) * exp(-(tau/t_phi)^stretch).
    A t_phi of None (or inf) means no dephasing: pure relaxation envelope.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be non-negative")
    t_phi = np.inf if fit.t_phi is None else fit.t_phi
    with np.errstate(divide="ignore"):
        chi_n = np.where(tau > 0, (tau / t_phi) ** fit.stretch, 0.0)
    result = (fit.offset
              + fit.amplitude * np.exp(-tau / (2.0 * t1)) * np.exp(-chi_n))
    return float(result) if result.ndim == 0 else result


def t2_from_dephasing(t1: float, t_phi: float, stretch: float) -> float:
    """Solve exp(-tau/2T1 - (tau/T_phi)^stretch) = 1/e for tau.

    Root-bracketed on [min(T1, T_phi)/10, 10*max(2*T1, T_phi)] and solved
    to machine precision; with T1 = inf this reduces to tau = T_phi.
    """
    if np.isinf(t1) and np.isinf(t_phi):
        raise ValueError("t1 and t_phi cannot both be infinite")

    def excess(tau):
        return tau / (2.0 * t1) + (tau / t_phi) ** stretch - 1.0

    lo = min(t1, t_phi) / 10.0
    hi = 10.0 * max(2.0 * t1, t_phi)
    if np.isinf(hi):
        finite = t_phi if np.isinf(t1) else 2.0 * t1
        lo, hi = finite / 10.0, 10.0 * finite
    return float(brentq(excess, lo, hi, xtol=1e-300,
                        rtol=4.0 * np.finfo(float).eps))


def fit_cpmg(trace: DecayTrace, t1: float) -> CoherenceFit:
    """Fit a CPMG/echo decay with T1 held fixed from a relaxation fit.

    Free parameters: offset p0, amplitude a (absorbing pulse losses),
    dephasing time T_phi, and the stretch exponent within [0.5, 4]
    (initialized at 2, the quasi-static expectation).  The returned fit
    carries t2 = T2_CPMG solved from the 1/e definition.  A stretch pinned
    at either bound flags "stretch_at_bound" (exponent unreliable).
    """
    if trace.kind not in ("cpmg", "echo"):
        raise ValueError("fit_cpmg expects a cpmg or echo trace")
    if not t1 > 0:
        raise ValueError("t1 must be positive")
    t, y = trace.times, trace.populations
    if len(t) < 5:
        raise FitError("need at least 5 points")

    p0_0 = y[-1]
    a_0 = max(y[0] - y[-1], 1e-3)
    # strip the known relaxation envelope to place the 1/e point of chi_N
    with np.errstate(divide="ignore", invalid="ignore"):
        coh = np.clip((y - p0_0) / (a_0 * np.exp(-t / (2.0 * t1))),
                      1e-9, None)
    above = np.nonzero(coh > np.exp(-1.0))[0]
    t_phi_0 = t[above[-1]] if len(above) else t[max(len(t) // 3, 1) - 1]
    t_phi_0 = float(np.clip(t_phi_0, t[0], t[-1]))

    lo_s, hi_s = STRETCH_BOUNDS

    def residual(p):
        p0, a, t_phi, s = p
        return (p0 + a * np.exp(-t / (2.0 * t1))
                * np.exp(-(t / t_phi) ** s) - y)

    result = run_least_squares(
        residual, [p0_0, a_0, t_phi_0, 2.0],
        bounds=([-np.inf, -np.inf, t[0] * 1e-3, lo_s],
                [np.inf, np.inf, t[-1] * 1e3, hi_s]))
    p0, a, t_phi, s = result.x
    errs = stderr(result, len(t))
    flags = []
    if min(abs(s - lo_s), abs(s - hi_s)) < 1e-6:
        flags.append("stretch_at_bound")
    t2 = t2_from_dephasing(t1, t_phi, s)
    return CoherenceFit(amplitude=float(a), offset=float(p0), t1=float(t1),
                        t2=float(t2), t_phi=float(t_phi), stretch=float(s),
                        errors={"offset": errs[0], "amplitude": errs[1],
                                "t_phi": errs[2], "stretch": errs[3]},
                        flags=tuple(flags))


def fit_scaling(points) -> ScalingFit:
    """Log-log fit of T_phi versus N giving beta, then alpha = beta/(1-beta).

    points: sequence of (N, T_phi) with N >= 1, T_phi > 0, at least three
    entries.  Raises ScalingError (carrying the fitted beta) when beta
    falls outside (0, 1), where alpha is undefined or non-positive.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise FitError("need at least 3 (N, T_phi) points")
    n, t_phi = pts[:, 0], pts[:, 1]
    if np.any(n < 1) or np.any(t_phi <= 0):
        raise FitError("need N >= 1 and T_phi > 0")

    coeffs, cov = np.polyfit(np.log(n), np.log(t_phi), 1, cov=True)
    beta = float(coeffs[0])
    beta_err = float(np.sqrt(max(cov[0, 0], 0.0)))
    if not 0.0 < beta < 1.0:
        raise ScalingError(
            f"fitted beta = {beta:.4g} outside (0, 1): alpha undefined",
            beta=beta, beta_err=beta_err)
    alpha = beta / (1.0 - beta)
    alpha_err = beta_err / (1.0 - beta) ** 2
    return ScalingFit(beta=beta, alpha=alpha, beta_err=beta_err,
                      alpha_err=alpha_err)


def _efold_guess(t, y, p0, a):
    """Crude 1/e-crossing time of (y - p0)/a, for initializing decay fits."""
    if a != 0:
        below = np.nonzero(np.abs(y - p0) <= abs(a) / np.e)[0]
        if len(below) and below[0] > 0:
            return float(t[below[0]] - t[0])
    return float((t[-1] - t[0]) / 3.0)
