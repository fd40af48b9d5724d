"""Noise spectral-density reconstruction and low-frequency spectra.

High-frequency total noise comes from CPMG dephasing times: a sequence
with N pulses samples noise in a narrow band around its filter peak, so

    S(f_N) = 1 / (pi * T_phi^2 * g_N(2 pi f_N, T_phi) * delta_omega_N)

with the filter evaluated at total time T_phi.  The 1/pi re-expresses
the box estimate, which is native to the angular phase-accumulation
integral, as a one-sided density of the qubit frequency in Hz^2/Hz,
the convention used throughout.  Frequency-noise points
(Hz^2/Hz) convert to gate-referred voltage noise (uV^2/Hz) through the
lever arm, transverse noise at the qubit frequency follows from T1, and
slow drift spectra come from an unwindowed mean-subtracted periodogram
of repeated Ramsey frequency estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .ddfilter import PulseSequence, filter_value, first_harmonic_peak
from .fitutil import FitError
from .units import TWO_PI

#: units tag for qubit-frequency noise, Hz^2/Hz
FREQ_NOISE = "freq_noise"
#: units tag for gate-referred voltage noise, uV^2/Hz
VOLTAGE_NOISE = "voltage_noise"

_UV2_PER_V2 = 1e12


@dataclass(frozen=True)
class PSDPoint:
    """One point of a noise spectrum.

    freq  : frequency (Hz), > 0
    value : spectral density, >= 0
    units : FREQ_NOISE (Hz^2/Hz) or VOLTAGE_NOISE (uV^2/Hz)
    """

    freq: float
    value: float
    units: str = FREQ_NOISE

    def __post_init__(self):
        if self.freq <= 0:
            raise ValueError("freq must be positive")
        if self.value < 0:
            raise ValueError("value must be non-negative")
        if self.units not in (FREQ_NOISE, VOLTAGE_NOISE):
            raise ValueError(f"unknown units tag {self.units!r}")


@dataclass(frozen=True)
class NoiseSource:
    """A labeled noise channel with its qubit-frequency sensitivity.

    sensitivity : d omega_q / d lambda in rad/s per source unit
    """

    name: str
    sensitivity: float

    def __post_init__(self):
        if not math.isfinite(self.sensitivity):
            raise ValueError("sensitivity must be finite")


@dataclass(frozen=True)
class FrequencySeries:
    """Uniformly sampled record of tracked qubit frequency.

    timestamps : s, uniformly spaced within 1%
    freqs      : qubit frequency per Ramsey iteration (Hz)
    """

    timestamps: np.ndarray
    freqs: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=float)
        fs = np.asarray(self.freqs, dtype=float)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "freqs", fs)
        if ts.ndim != 1 or ts.shape != fs.shape:
            raise ValueError("timestamps and freqs must be 1-d, equal length")
        if len(ts) < 8:
            raise ValueError("need at least 8 samples")
        steps = np.diff(ts)
        if np.any(steps <= 0):
            raise ValueError("timestamps must be strictly increasing")
        mean_step = steps.mean()
        if np.any(np.abs(steps - mean_step) > 0.01 * mean_step):
            raise ValueError("timestamps must be uniform within 1%")

    @property
    def dt(self) -> float:
        return float(np.diff(self.timestamps).mean())


def reconstruct_psd_point(t_phi: float, seq: PulseSequence) -> PSDPoint:
    """Total noise density sampled by a CPMG sequence at its filter peak.

    Evaluates the filter of `seq` at total time T_phi, finds the
    first-harmonic peak (f_N, delta_omega_N), and returns
    S = 1 / (pi * T_phi^2 * g_N(2 pi f_N) * delta_omega_N) at f_N in
    Hz^2/Hz.  The 1/pi maps the box estimate, native to the angular
    phase-accumulation integral, onto the one-sided qubit-frequency
    density sampled at 2 pi rad/s per Hz of detuning, so a round trip
    (synthesize frequency noise -> decay -> fit -> reconstruct) lands on
    the injected spectrum.  Requires n_pulses >= 1 (Ramsey has no
    harmonic passband).
    """
    if seq.n_pulses < 1:
        raise ValueError("reconstruction needs n_pulses >= 1")
    if t_phi <= 0:
        raise ValueError("t_phi must be positive")
    seq_at_tphi = replace(seq, tau=t_phi)
    peak = first_harmonic_peak(seq_at_tphi)
    g_pk = filter_value(seq_at_tphi, TWO_PI * peak.f_peak)
    value = 1.0 / (np.pi * t_phi**2 * g_pk * peak.delta_omega)
    return PSDPoint(freq=peak.f_peak, value=value, units=FREQ_NOISE)


def to_voltage_noise(point: PSDPoint, lever: float) -> PSDPoint:
    """Convert frequency noise (Hz^2/Hz) to voltage noise (uV^2/Hz).

    S_v = S_f / lever^2 with the lever arm in Hz/V; undefined at the
    sweet spot where the lever arm vanishes.
    """
    if point.units != FREQ_NOISE:
        raise ValueError("input must be in frequency-noise units")
    if lever == 0:
        raise ValueError("lever arm is zero (sweet spot): voltage-noise "
                         "conversion undefined")
    return PSDPoint(freq=point.freq,
                    value=point.value / lever**2 * _UV2_PER_V2,
                    units=VOLTAGE_NOISE)


def transverse_noise(t1: float, f_q: float) -> PSDPoint:
    """Transverse noise density at the qubit frequency implied by T1.

    1/T1 = (pi/2) S(2 pi f_q), so S = 2/(pi T1) in Hz^2/Hz.
    """
    if t1 <= 0:
        raise ValueError("t1 must be positive")
    return PSDPoint(freq=f_q, value=2.0 / (np.pi * t1), units=FREQ_NOISE)


def powerlaw_fit(points) -> dict:
    """Fit S = A / f^alpha by log-log linear regression.

    points: >= 3 PSDPoints (or (freq, value) pairs) with distinct
    frequencies and strictly positive values.  Returns a dict with
    amplitude, exponent and their standard errors.
    """
    freqs, values = _as_arrays(points)
    if len(freqs) < 3:
        raise FitError("need at least 3 points")
    if len(np.unique(freqs)) != len(freqs):
        raise FitError("frequencies must be distinct")
    if np.any(values <= 0):
        raise FitError("power-law fit undefined for non-positive values")

    coeffs, cov = np.polyfit(np.log(freqs), np.log(values), 1, cov=True)
    exponent = -float(coeffs[0])
    amplitude = float(np.exp(coeffs[1]))
    exp_err = float(np.sqrt(max(cov[0, 0], 0.0)))
    amp_err = amplitude * float(np.sqrt(max(cov[1, 1], 0.0)))
    return {"amplitude": amplitude, "exponent": exponent,
            "amplitude_err": amp_err, "exponent_err": exp_err}


def ramsey_fft(trace) -> list[tuple[float, float]]:
    """Dominant spectral peaks of a Ramsey trace, sorted by power.

    Computes the one-sided power spectrum of the mean-subtracted signal on
    a uniform time grid (>= 16 points) and reports local maxima holding at
    least 20% of the strongest bin as (frequency, power) pairs in
    descending power.  All-zero signals give an empty list.
    """
    t = np.asarray(trace.times, dtype=float)
    y = np.asarray(trace.populations, dtype=float)
    if len(t) < 16:
        raise ValueError("need at least 16 points")
    steps = np.diff(t)
    if np.any(np.abs(steps - steps.mean()) > 0.01 * steps.mean()):
        raise ValueError("ramsey_fft requires a uniform time grid")

    power = np.abs(np.fft.rfft(y - y.mean())) ** 2
    freqs = np.fft.rfftfreq(len(t), steps.mean())
    if power.max() == 0:
        return []
    threshold = 0.2 * power.max()
    interior = np.arange(1, len(power) - 1)
    is_peak = ((power[interior] >= power[interior - 1])
               & (power[interior] >= power[interior + 1])
               & (power[interior] >= threshold))
    idx = interior[is_peak]
    # the strongest bin may sit at the spectrum edge
    for edge in (1, len(power) - 1):
        if power[edge] >= threshold and edge not in idx \
                and power[edge] == power.max():
            idx = np.append(idx, edge)
    order = np.argsort(power[idx])[::-1]
    return [(float(freqs[i]), float(power[i])) for i in idx[order]]


def periodogram(series: FrequencySeries) -> list[PSDPoint]:
    """Unwindowed one-sided periodogram of a frequency record.

    PSD in Hz^2/Hz on the Fourier grid [1/(n dt), 1/(2 dt)], normalized so
    that sum(PSD * delta_f) equals the variance of the mean-subtracted
    series exactly (Parseval).  The mean (DC bin) is removed.
    """
    freqs, psd = _periodogram_arrays(series.timestamps, series.freqs)
    return [PSDPoint(freq=float(f), value=float(v), units=FREQ_NOISE)
            for f, v in zip(freqs, psd)]


def _periodogram_arrays(timestamps, values):
    """(frequency grid, one-sided PSD) with exact Parseval normalization."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    if n < 8:
        raise ValueError("need at least 8 samples")
    dt = float(np.diff(timestamps).mean())
    spectrum = np.fft.rfft(values - values.mean())
    freqs = np.fft.rfftfreq(n, dt)
    scale = np.full(len(spectrum), 2.0 * dt / n)
    if n % 2 == 0:
        scale[-1] = dt / n      # the Nyquist bin has no mirror image
    psd = scale * np.abs(spectrum) ** 2
    return freqs[1:], psd[1:]


def _as_arrays(points):
    """Accept PSDPoint lists or plain (freq, value) pairs."""
    if len(points) and isinstance(points[0], PSDPoint):
        freqs = np.array([p.freq for p in points], dtype=float)
        values = np.array([p.value for p in points], dtype=float)
        return freqs, values
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise FitError("expected PSDPoints or (freq, value) pairs")
    return pts[:, 0], pts[:, 1]
