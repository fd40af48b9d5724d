"""Monte Carlo dephasing oracle.

Synthesizes Gaussian noise records with a prescribed power-law PSD,
accumulates the qubit phase under a CPMG sequence trajectory by
trajectory, and evaluates the corresponding filter-function dephasing
integral numerically.  Serves as the independent ground truth for the
decay-fitting and PSD-reconstruction modules.

Conventions.  S(f) = amplitude / f^alpha is the one-sided PSD of the
noise variable lambda in (lambda units)^2/Hz; `sensitivity` is
d omega_q / d lambda in rad/s per lambda unit.  A trajectory's phase is
phi(tau) = sensitivity * integral_0^tau s(t) lambda(t) dt with s(t) = +-1
flipping at the pulse centers tau*(j-1/2)/N, and for Gaussian noise

    chi(tau) = <phi^2>/2
             = (sensitivity^2 tau^2 / 2) * integral S(f) g_N(2 pi f, tau) df.

Randomness: trajectory i draws from SeedSequence(seed, spawn_key=(i,)),
so ensembles are bit-identical for a given (seed, n_traj) regardless of
how the loop is scheduled, and the ensemble mean is reduced once over the
assembled array in index order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .ddfilter import PulseSequence, filter_value
from .decayfit import DecayTrace
from .units import TWO_PI

# records are synthesized at least this many times longer than the longest
# delay so the Fourier grid oversamples the filter's first-harmonic lobe
_RECORD_STRETCH = 2.0
# cap on record length when resolving very low f_min; anything slower than
# 1/(_MAX_STRETCH * tau) is indistinguishable from static over one shot
_MAX_STRETCH = 64.0


@dataclass(frozen=True)
class SyntheticNoise:
    """Power-law noise specification S(f) = amplitude / f^alpha.

    amplitude : PSD scale, units^2/Hz at 1 Hz; >= 0 (0 = no noise)
    alpha     : exponent in [0, 3]
    f_min     : lower band edge (Hz), > 0
    f_max     : upper band edge (Hz), > f_min
    seed      : base seed for the trajectory streams
    """

    amplitude: float
    alpha: float
    f_min: float
    f_max: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.f_min < self.f_max:
            raise ValueError("need 0 < f_min < f_max")
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")
        if not 0.0 <= self.alpha <= 3.0:
            raise ValueError("alpha must lie in [0, 3]")


@dataclass(frozen=True)
class Trajectory:
    """One synthesized noise record lambda(t) on a uniform grid."""

    dt: float
    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples",
                           np.asarray(self.samples, dtype=float))
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if len(self.samples) < 2:
            raise ValueError("need at least 2 samples")


def band_variance(spec: SyntheticNoise, f_lo: float, f_hi: float) -> float:
    """integral of A f^-alpha over [f_lo, f_hi] (0 if the band is empty)."""
    if f_hi <= f_lo:
        return 0.0
    if spec.alpha == 1.0:
        return spec.amplitude * np.log(f_hi / f_lo)
    p = 1.0 - spec.alpha
    return spec.amplitude * (f_hi**p - f_lo**p) / p


def synthesize_noise(spec: SyntheticNoise, dt: float, n: int,
                     stream: int = 0) -> Trajectory:
    """Draw one noise record by Gaussian spectral synthesis.

    Each resolved Fourier bin f_k in the band gets an independent complex
    Gaussian coefficient with variance S(f_k) * n/(2 dt), so the ensemble
    periodogram reproduces S(f) exactly on the grid [1/(n dt), 1/(2 dt)].
    Band below the record resolution is not dropped: its integrated
    variance enters as a per-record static offset (with a warning), which
    is the physical meaning of noise slower than the record.  Band above
    Nyquist is clipped with a warning.

    `stream` selects the independent substream (trajectory index).
    """
    if n < 4:
        raise ValueError("n must be >= 4")
    if dt <= 0:
        raise ValueError("dt must be positive")
    rng = np.random.default_rng(
        np.random.SeedSequence(spec.seed, spawn_key=(stream,)))
    freqs = np.fft.rfftfreq(n, dt)
    f_res, f_nyq = freqs[1], freqs[-1]

    spectrum = np.zeros(len(freqs), dtype=complex)
    if spec.amplitude > 0 and spec.f_max > f_nyq:
        warnings.warn("f_max exceeds the Nyquist frequency 1/(2 dt); "
                      "band clipped at Nyquist")
    in_band = (freqs >= spec.f_min) & (freqs <= spec.f_max) & (freqs > 0)
    psd = np.zeros(len(freqs))
    psd[in_band] = spec.amplitude * freqs[in_band] ** -spec.alpha

    z = rng.standard_normal(len(freqs)) + 1j * rng.standard_normal(len(freqs))
    spectrum = np.sqrt(psd * n / (2.0 * dt)) * z / np.sqrt(2.0)
    if n % 2 == 0:
        # the Nyquist coefficient of a real record is real and unmirrored
        spectrum[-1] = np.sqrt(psd[-1] * n / dt) * z[-1].real / np.sqrt(2.0)

    if spec.amplitude > 0 and spec.f_min < f_res:
        warnings.warn("band extends below the record resolution 1/(n dt); "
                      "that part enters as a per-record static offset")
        var_static = band_variance(spec, spec.f_min, min(spec.f_max, f_res))
        spectrum[0] = n * np.sqrt(var_static) * rng.standard_normal()

    return Trajectory(dt=dt, samples=np.fft.irfft(spectrum, n=n))


def simulate_sequence(spec: SyntheticNoise, seq: PulseSequence,
                      sensitivity: float, n_traj: int, dt: float,
                      taus=None) -> DecayTrace:
    """Ensemble-average coherence decay under a pulse sequence.

    Each trajectory synthesizes an independent noise record (long enough
    to oversample the filter lobe and to resolve f_min, capped at
    _MAX_STRETCH times the longest delay), accumulates the signed phase
    integral at every requested delay, and the trace reports
    P_e = (1 + |<e^{i phi}>|)/2 so that full coherence maps to P_e = 1.

    taus defaults to 24 points up to seq.tau.  dt must satisfy
    dt <= tau/(10 N) so pulse boundaries are resolved.
    """
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    n_pi = seq.n_pulses
    if dt > seq.tau / (10.0 * max(n_pi, 1)):
        raise ValueError("dt too coarse: need dt <= tau/(10 N)")
    if taus is None:
        taus = np.linspace(seq.tau / 24.0, seq.tau, 24)
    taus = np.sort(np.asarray(taus, dtype=float))
    if taus[0] <= 0 or taus[-1] > seq.tau * (1 + 1e-12):
        raise ValueError("taus must lie in (0, seq.tau]")

    record_span = max(_RECORD_STRETCH * seq.tau,
                      min(1.0 / spec.f_min, _MAX_STRETCH * seq.tau))
    n = int(np.ceil(record_span / dt))
    t_knots = np.arange(n) * dt

    # phase-segment boundaries for every requested delay: 0, the pulse
    # centers tau*(j-1/2)/N, and tau itself; segment signs alternate +,-,...
    frac = np.concatenate(([0.0], (np.arange(1, n_pi + 1) - 0.5) / max(n_pi, 1),
                           [1.0]))
    bounds = np.multiply.outer(taus, frac)            # (n_tau, n_pi+2)
    seg_signs = (-1.0) ** np.arange(n_pi + 1)

    phasors = np.empty((n_traj, len(taus)), dtype=complex)
    for i in range(n_traj):
        lam = synthesize_noise(spec, dt, n, stream=i).samples
        cum = np.concatenate(
            ([0.0], np.cumsum(0.5 * (lam[1:] + lam[:-1]) * dt)))
        cum_at = np.interp(bounds.ravel(), t_knots, cum).reshape(bounds.shape)
        phi = sensitivity * (np.diff(cum_at, axis=1) * seg_signs).sum(axis=1)
        phasors[i] = np.exp(1j * phi)
    mean_phasor = phasors.mean(axis=0)
    coherence = np.abs(mean_phasor)

    kind = {0: "ramsey", 1: "echo"}.get(n_pi, "cpmg")
    return DecayTrace(times=taus, populations=0.5 * (1.0 + coherence),
                      kind=kind, n_pulses=n_pi)


def dephasing_integral(psd, seq: PulseSequence, sensitivity: float,
                       points_per_cycle: int = 64) -> float:
    """chi_N(tau): the filter-weighted noise integral at tau = seq.tau.

    chi = (sensitivity^2 tau^2 / 2) * integral_band S(f) g_N(2 pi f, tau) df.

    `psd` is a SyntheticNoise or a mapping with amplitude (or A), alpha,
    and optionally f_min/f_max.  Missing f_min defaults to the infrared
    cutoff 1/(100 tau); an explicit f_min <= 0 with alpha >= 1 is rejected
    (the integral diverges without a cutoff).  Missing f_max defaults to
    100 max(N,1)/tau, far past the filter's passband.  Quadrature is a
    trapezoid rule on the union of a linear grid resolving the filter
    oscillation (points_per_cycle per period 1/tau) and a log grid
    resolving the power-law decades; doubling points_per_cycle is the
    convergence check.

    For Gaussian noise, coherence = exp(-chi): compare with
    -log of the simulate_sequence coherence.
    """
    amplitude, alpha, f_min, f_max = _unpack_psd(psd)
    if not 0.0 <= alpha < 3.0:
        raise ValueError("alpha must lie in [0, 3)")
    if f_min is None:
        f_min = 1.0 / (100.0 * seq.tau)
    if f_min <= 0 and alpha >= 1.0:
        raise ValueError("1/f^alpha with alpha >= 1 diverges at DC: an "
                         "infrared cutoff f_min > 0 is required")
    if f_max is None:
        f_max = 100.0 * max(seq.n_pulses, 1) / seq.tau
    if f_max <= max(f_min, 0.0):
        raise ValueError("f_max must exceed f_min")
    if amplitude == 0.0:
        return 0.0

    f_lo = f_min if f_min > 0 else f_max * 1e-9
    df = 1.0 / (points_per_cycle * seq.tau)
    lin = np.arange(f_lo, f_max, df)
    per_decade = max(2, 8 * points_per_cycle)
    n_log = max(2, int(np.log10(f_max / f_lo) * per_decade))
    log = np.geomspace(f_lo, f_max, n_log)
    grid = np.unique(np.concatenate((lin, log, [f_max])))

    integrand = (amplitude * grid ** -alpha
                 * filter_value(seq, TWO_PI * grid))
    chi = (0.5 * sensitivity**2 * seq.tau**2
           * np.trapezoid(integrand, grid))
    if f_min <= 0 and seq.n_pulses == 0:
        # analytic stub of the integrable sub-grid tail, where g ~ 1
        chi += (0.5 * sensitivity**2 * seq.tau**2
                * amplitude * f_lo ** (1.0 - alpha) / (1.0 - alpha))
    return float(chi)


def _unpack_psd(psd):
    """Accept a SyntheticNoise or a {amplitude|A, alpha, f_min?, f_max?}."""
    if isinstance(psd, SyntheticNoise):
        return psd.amplitude, psd.alpha, psd.f_min, psd.f_max
    amplitude = psd["amplitude"] if "amplitude" in psd else psd["A"]
    f_min = psd.get("f_min")
    f_max = psd.get("f_max")
    return float(amplitude), float(psd["alpha"]), \
        None if f_min is None else float(f_min), \
        None if f_max is None else float(f_max)
