"""Shared synthetic-data builders for the test suite."""

import json
from pathlib import Path

import numpy as np
import pytest

from qnl.decayfit import DecayTrace
from qnl.fileio import atomic_write_text, write_decay_trace


def make_relaxation(t1=11.6e-6, amplitude=0.9, offset=0.05, n=48,
                    t_max=None, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    t = np.linspace(0.02 * t1, t_max or 5.0 * t1, n)
    p = offset + amplitude * np.exp(-t / t1) + noise * rng.normal(size=n)
    return DecayTrace(times=t, populations=np.clip(p, -0.1, 1.1),
                      kind="relaxation")


def make_ramsey(t2=8.2e-6, detuning=0.5e6, amplitude=0.45, offset=0.5,
                phase=0.0, n=240, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 3.0 * t2, n)
    p = offset + amplitude * np.exp(-t / t2) * np.cos(
        2.0 * np.pi * detuning * t + phase)
    p = p + noise * rng.normal(size=n)
    return DecayTrace(times=t, populations=np.clip(p, -0.1, 1.1),
                      kind="ramsey")


def make_cpmg(n_pulses, t1=11.94e-6, t_phi=5e-6, stretch=2.5,
              amplitude=0.45, offset=0.5, n=40, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    t = np.linspace(0.05 * t_phi, 2.5 * t_phi, n)
    p = offset + amplitude * np.exp(-t / (2.0 * t1)) * np.exp(
        -(t / t_phi) ** stretch)
    p = p + noise * rng.normal(size=n)
    kind = "echo" if n_pulses == 1 else "cpmg"
    return DecayTrace(times=t, populations=np.clip(p, -0.1, 1.1),
                      kind=kind, n_pulses=n_pulses)


def q1_dataset(root: Path) -> dict:
    """A full synthetic device dataset on disk; returns the pipeline config.

    Built from known ground truth: T1 = 11.6 us, T2* = 8.2 us, CPMG
    T_phi = 4 us * N^0.61 with stretch 2, plus a 1/f^1.3 frequency drift
    record, so every downstream fit has a target the tests can check.
    """
    root.mkdir(parents=True, exist_ok=True)
    traces = []

    trace = make_relaxation(noise=0.01, seed=1)
    write_decay_trace(root / "q1_relax.csv", trace, bias_mv=2.0)
    traces.append(str(root / "q1_relax.csv"))

    trace = make_ramsey(noise=0.01, seed=2)
    write_decay_trace(root / "q1_ramsey.csv", trace, bias_mv=2.0)
    traces.append(str(root / "q1_ramsey.csv"))

    for n_pulses in (1, 2, 4, 8):
        t_phi = 4e-6 * n_pulses ** 0.61
        trace = make_cpmg(n_pulses, t1=11.6e-6, t_phi=t_phi, stretch=2.0,
                          noise=0.008, seed=10 + n_pulses)
        name = f"q1_cpmg{n_pulses}.csv"
        write_decay_trace(root / name, trace, bias_mv=2.0)
        traces.append(str(root / name))

    from qnl.mcsim import SyntheticNoise, synthesize_noise
    from qnl.noisespec import FrequencySeries
    from qnl.fileio import write_frequency_series
    n, dt = 4096, 0.5
    spec = SyntheticNoise(amplitude=2e4, alpha=1.3, f_min=1.0 / (n * dt),
                          f_max=0.5 / dt, seed=5)
    drift = synthesize_noise(spec, dt, n)
    series = FrequencySeries(timestamps=np.arange(n) * dt,
                             freqs=5.065e9 + drift.samples)
    write_frequency_series(root / "q1_drift.csv", series)

    config = {
        "output_dir": str(root / "out"),
        "decay_traces": traces,
        "frequency_series": str(root / "q1_drift.csv"),
        "qubit": {"f_ss": 5.065e9, "lever_c": 2.348e12, "v_ss": 0.0,
                  "f_q": 5.065e9, "f_r": 5.668e9,
                  "kappa": 2.0 * np.pi * 0.38e6,
                  "chi": -2.0 * np.pi * 0.06e6, "t1": 11.6e-6},
        "temperatures_k": [0.05, 0.1, 0.2, 0.3, 0.4],
    }
    atomic_write_text(root / "config.json", json.dumps(config))
    return config


@pytest.fixture()
def q1_config(tmp_path):
    return q1_dataset(tmp_path / "q1")
