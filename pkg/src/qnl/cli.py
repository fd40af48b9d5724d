"""Command-line entry points for the analysis chain.

Every subcommand is a thin shell over the library: parse arguments, load
files, call one function, print JSON or CSV.  Exit status is 0 on
success, 1 on validation errors or failed fits.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import asdict, replace

import click
import numpy as np

from .ddfilter import PulseSequence, filter_value, first_harmonic_peak
from .decayfit import fit_cpmg, fit_ramsey, fit_relaxation
from .fileio import (format_psd_csv, load_decay_trace, load_frequency_series,
                     load_psd_csv, load_spectroscopy_trace, load_two_tone_map,
                     write_decay_trace, write_thermal_csv)
from .fitutil import FitError
from .mcsim import SyntheticNoise, simulate_sequence
from .noisespec import (periodogram, powerlaw_fit, reconstruct_psd_point)
from .pipeline import (AnalysisConfig, PipelineError, run_pipeline,
                       validate_inputs)
from .resonator import FilmParams, kinetic_inductance, lumped_model
from .spectro import fit_dispersion, fit_transmission
from .thermal import (ThermalModel, photon_occupation, resonator_dephasing,
                      t1_vs_temperature, thermal_population)


def _echo_json(payload) -> None:
    click.echo(json.dumps(payload, indent=1, sort_keys=True))


def _parse_grid(text: str, steps_as_int: bool = True) -> np.ndarray:
    """'start:stop:steps' -> inclusive linspace."""
    try:
        start_s, stop_s, steps_s = text.split(":")
        start, stop, steps = float(start_s), float(stop_s), int(steps_s)
    except ValueError:
        raise click.BadParameter(f"expected start:stop:steps, got {text!r}")
    if steps < 2 or not stop > start:
        raise click.BadParameter(f"degenerate grid {text!r}")
    return np.linspace(start, stop, steps)


def _seed_option(seed: int) -> int:
    env = os.environ.get("QNL_SEED")
    return int(env) if env else seed


@click.group()
def main():
    """Noise spectroscopy analysis for charge-sensitive qubits."""


@main.command("fit-decay")
@click.argument("trace_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--t1", type=float, default=None,
              help="Fixed T1 (s) for echo/CPMG dephasing fits.")
def fit_decay_cmd(trace_path, t1):
    """Fit a decay trace CSV; kind comes from the JSON sidecar."""
    trace, meta = load_decay_trace(trace_path)
    try:
        if trace.kind == "relaxation":
            fit = fit_relaxation(trace)
        elif trace.kind == "ramsey":
            fit = fit_ramsey(trace)
        else:
            if t1 is None:
                raise click.UsageError(
                    "echo/CPMG traces need --t1 (seconds)")
            fit = fit_cpmg(trace, t1)
    except (FitError, ValueError) as exc:
        click.echo(f"fit failed: {exc}", err=True)
        sys.exit(1)
    payload = {k: v for k, v in asdict(fit).items() if v is not None}
    payload["kind"] = trace.kind
    payload["n_pulses"] = trace.n_pulses
    payload["flags"] = list(fit.flags)
    payload.update({f"meta_{k}": v for k, v in meta.items()})
    _echo_json(payload)


@main.command("fit-spectrum")
@click.argument("trace_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(["transmission", "dispersion"]),
              required=True)
@click.option("--f-r", type=float, default=None,
              help="Bare resonator frequency (Hz), transmission fits.")
@click.option("--kappa", type=float, default=None,
              help="Resonator linewidth (rad/s), transmission fits.")
def fit_spectrum_cmd(trace_path, kind, f_r, kappa):
    """Fit a transmission trace or a two-tone dispersion map."""
    try:
        if kind == "transmission":
            if f_r is None or kappa is None:
                raise click.UsageError(
                    "transmission fits need --f-r and --kappa")
            trace = load_spectroscopy_trace(trace_path)
            result = fit_transmission(trace, {"f_r": f_r, "kappa": kappa})
        else:
            table = load_two_tone_map(trace_path)
            from .pipeline import _ridge_points
            disp, extras = fit_dispersion(_ridge_points(table),
                                          full_output=True)
            result = {"f_ss": disp.f_ss, "lever_c": disp.lever_c,
                      "v_ss": disp.v_ss, **extras}
    except (FitError, ValueError) as exc:
        click.echo(f"fit failed: {exc}", err=True)
        sys.exit(1)
    _echo_json(result)


@main.command("reconstruct-psd")
@click.option("--t-phi", type=float, required=True,
              help="Fitted dephasing time (s).")
@click.option("--n-pulses", type=int, required=True)
@click.option("--tau-pi", type=float, default=0.0, show_default=True)
def reconstruct_psd_cmd(t_phi, n_pulses, tau_pi):
    """Single-point PSD estimate from one CPMG dephasing time."""
    seq = PulseSequence(n_pulses=n_pulses, tau=t_phi, tau_pi=tau_pi)
    point = reconstruct_psd_point(t_phi, seq)
    _echo_json({"freq_hz": point.freq, "psd": point.value,
                "units": point.units})


@main.command("periodogram")
@click.argument("series_path", type=click.Path(exists=True, dir_okay=False))
def periodogram_cmd(series_path):
    """PSD of a uniformly sampled frequency time series, as CSV."""
    series = load_frequency_series(series_path)
    click.echo(format_psd_csv(periodogram(series)), nl=False)


@main.command("powerlaw-fit")
@click.argument("psd_path", type=click.Path(exists=True, dir_okay=False))
def powerlaw_fit_cmd(psd_path):
    """Fit S = A/f^alpha to PSD points from a CSV."""
    points = load_psd_csv(psd_path)
    if len(points) < 3:
        click.echo("need at least 3 PSD points", err=True)
        sys.exit(1)
    _echo_json(powerlaw_fit(points))


@main.command("thermal-model")
@click.option("--fq", type=float, required=True, help="Qubit frequency (Hz).")
@click.option("--fr", type=float, required=True,
              help="Resonator frequency (Hz).")
@click.option("--kappa", type=float, required=True,
              help="Resonator linewidth (rad/s).")
@click.option("--chi", type=float, required=True,
              help="Dispersive shift (rad/s).")
@click.option("--t1-zero", type=float, required=True,
              help="Zero-temperature T1 (s).")
@click.option("--temps", required=True, metavar="TMIN:TMAX:STEPS",
              help="Temperature grid in kelvin.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write CSV here instead of stdout.")
def thermal_model_cmd(fq, fr, kappa, chi, t1_zero, temps, out):
    """Occupation, T1 and dephasing rate on a temperature grid, as CSV."""
    model = ThermalModel(f_q=fq, f_r=fr, kappa=kappa, chi=chi,
                         t1_zero=t1_zero)
    rows = []
    for temp in _parse_grid(temps):
        n_th = photon_occupation(fr, temp)
        rows.append((temp, t1_vs_temperature(model, temp),
                     thermal_population(fq, temp), n_th,
                     resonator_dephasing(model, n_th)))
    if out:
        write_thermal_csv(out, rows)
    else:
        click.echo("temp_k,t1_s,pe,n_th,gamma_phi")
        for row in rows:
            click.echo(",".join(repr(float(v)) for v in row))


@main.command("resonator-calc")
@click.option("--tc", type=float, required=True,
              help="Film critical temperature (K).")
@click.option("--rsq", type=float, required=True,
              help="Normal-state sheet resistance (ohm/square).")
@click.option("--width", type=float, required=True, help="Strip width (m).")
@click.option("--length", type=float, required=True, help="Strip length (m).")
@click.option("--fdiff", type=float, required=True,
              help="Differential-mode frequency (Hz).")
def resonator_calc_cmd(tc, rsq, width, length, fdiff):
    """Kinetic inductance and the lumped-element mode parameters."""
    l_k = kinetic_inductance(FilmParams(t_c=tc, r_square=rsq))
    model = lumped_model(l_k, width=width, length=length, f_diff=fdiff)
    _echo_json({"l_k_h_per_square": l_k, **asdict(model)})


@main.command("simulate")
@click.option("--amplitude", type=float, required=True,
              help="PSD amplitude A in S(f) = A/f^alpha (Hz^2/Hz x Hz^alpha "
                   "per unit sensitivity^2).")
@click.option("--alpha", type=float, required=True)
@click.option("--fmin", type=float, required=True)
@click.option("--fmax", type=float, required=True)
@click.option("--n-pulses", type=int, required=True)
@click.option("--tau-grid", required=True, metavar="TMIN:TMAX:STEPS")
@click.option("--tau-pi", type=float, default=0.0, show_default=True)
@click.option("--sensitivity", type=float, default=1.0, show_default=True,
              help="d(omega_q)/d(lambda) in rad/s per noise unit.")
@click.option("--n-traj", type=int, default=400, show_default=True)
@click.option("--dt", type=float, default=None,
              help="Sample step (s); default tau_min/(32 max(N,1)).")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Overridden by the QNL_SEED environment variable.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write a decay-trace CSV (+ sidecar) instead of stdout.")
def simulate_cmd(amplitude, alpha, fmin, fmax, n_pulses, tau_grid, tau_pi,
                 sensitivity, n_traj, dt, seed, out):
    """Monte Carlo dephasing decay under synthesized power-law noise."""
    taus = _parse_grid(tau_grid)
    if dt is None:
        dt = taus[0] / (32.0 * max(n_pulses, 1))
    spec = SyntheticNoise(amplitude=amplitude, alpha=alpha, f_min=fmin,
                          f_max=fmax, seed=_seed_option(seed))
    seq = PulseSequence(n_pulses=n_pulses, tau=float(taus[-1]),
                        tau_pi=tau_pi)
    trace = simulate_sequence(spec, seq, sensitivity=sensitivity,
                              n_traj=n_traj, dt=dt, taus=taus)
    if out:
        write_decay_trace(out, trace)
    else:
        click.echo("tau_s,pe")
        for tau, pe in zip(trace.times, trace.populations):
            click.echo(f"{float(tau)!r},{float(pe)!r}")


@main.command("filter-fn")
@click.option("--n", "n_pulses", type=int, required=True,
              help="Pulse count; 0 = Ramsey.")
@click.option("--tau", type=float, required=True,
              help="Total evolution time (s).")
@click.option("--tau-pi", type=float, default=0.0, show_default=True)
@click.option("--grid", required=True, metavar="FMIN:FMAX:STEPS",
              help="Frequency grid (Hz).")
@click.option("--peak", is_flag=True,
              help="Also print the first-harmonic peak to stderr.")
def filter_fn_cmd(n_pulses, tau, tau_pi, grid, peak):
    """Tabulate the sequence filter g_N(2 pi f, tau) as freq_hz,g CSV."""
    seq = PulseSequence(n_pulses=n_pulses, tau=tau, tau_pi=tau_pi)
    freqs = _parse_grid(grid)
    values = filter_value(seq, 2.0 * np.pi * freqs)
    click.echo("freq_hz,g")
    for f, g in zip(freqs, values):
        click.echo(f"{float(f)!r},{float(g)!r}")
    if peak:
        pk = first_harmonic_peak(seq)
        click.echo(f"peak freq_hz={pk.f_peak!r} "
                   f"delta_omega={pk.delta_omega!r}", err=True)


@main.command("run")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
def run_cmd(config_path):
    """Run the full analysis pipeline from a JSON config."""
    try:
        config = AnalysisConfig.from_json(config_path)
        if os.environ.get("QNL_SEED"):
            config = replace(config, seed=int(os.environ["QNL_SEED"]))
        report = run_pipeline(config)
    except PipelineError as exc:
        for diag in exc.diagnostics:
            click.echo(str(diag), err=True)
        sys.exit(1)
    for line in report.warnings:
        click.echo(line, err=True)
    click.echo(str(os.path.join(config.output_dir, "report.json")))


@main.command("validate")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
def validate_cmd(config_path):
    """Validate a config and its inputs; exit 1 if any errors."""
    try:
        config = AnalysisConfig.from_json(config_path)
    except PipelineError as exc:
        for diag in exc.diagnostics:
            click.echo(str(diag))
        sys.exit(1)
    diags = validate_inputs(config)
    for diag in diags:
        click.echo(str(diag))
    if any(d.severity == "error" for d in diags):
        sys.exit(1)
    click.echo("ok")


if __name__ == "__main__":
    main()
