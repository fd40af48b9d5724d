"""End-to-end analysis pipeline: ingest, fit, reconstruct, report.

run_pipeline orchestrates the per-trace decay fits, the T_phi-vs-N
scaling, PSD reconstruction with voltage-noise conversion, the
low-frequency periodogram, thermal-model curves, and spectroscopy fits,
and writes a single JSON report plus per-table CSVs.  Every reported
number traces back to an input file (hashed in the provenance block) or
to a config parameter echoed verbatim.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .decayfit import (ScalingError, fit_cpmg, fit_ramsey, fit_relaxation,
                       fit_scaling)
from .ddfilter import PulseSequence
from .fileio import (DECAY_HEADER, SERIES_HEADER, SPECTRUM_HEADER,
                     TWO_TONE_HEADER, atomic_write_text, format_psd_csv,
                     load_charge_noise_table, load_decay_trace,
                     load_frequency_series, load_spectroscopy_trace,
                     load_two_tone_map, sha256_of, sidecar_path,
                     write_thermal_csv)
from .fitutil import FitError
from .noisespec import (periodogram, powerlaw_fit, reconstruct_psd_point,
                        to_voltage_noise, transverse_noise)
from .spectro import (QubitDispersion, fit_dispersion, fit_transmission,
                      lever_arm, qubit_frequency)
from .thermal import (ThermalModel, photon_occupation, resonator_dephasing,
                      t1_vs_temperature, thermal_population)

__version__ = "0.1.0"

_TRACE_KINDS = ("relaxation", "ramsey", "echo", "cpmg")

ALL_STAGES = ("decay", "scaling", "psd", "lowfreq", "thermal", "spectro")


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; severity is 'error' or 'warning'."""

    severity: str
    message: str
    file: str | None = None
    row: int | None = None
    column: str | None = None

    def __str__(self):
        place = self.file or ""
        if self.row is not None:
            place += f":row {self.row}"
        if self.column is not None:
            place += f":column {self.column}"
        prefix = f"[{self.severity}] "
        return prefix + (f"{place}: " if place else "") + self.message


class PipelineError(RuntimeError):
    """Raised when validation finds errors; carries the diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


@dataclass
class AnalysisConfig:
    """Pipeline inputs, qubit metadata, stage selection, and output paths.

    qubit keys used when present: f_ss, lever_c, v_ss (dispersion and
    voltage-noise conversion), f_r, kappa (transmission fit), chi, t1
    (thermal curves; t1 doubles as the CPMG fallback when a bias point has
    no relaxation trace).  All in SI units (Hz, rad/s, V, s).
    """

    output_dir: str
    decay_traces: list[str] = field(default_factory=list)
    frequency_series: str | None = None
    transmission_trace: str | None = None
    two_tone_map: str | None = None
    qubit: dict = field(default_factory=dict)
    temperatures_k: list[float] = field(default_factory=list)
    stages: list[str] = field(default_factory=lambda: list(ALL_STAGES))
    seed: int = 0

    @classmethod
    def from_json(cls, path) -> "AnalysisConfig":
        """Load a config, raising PipelineError on malformed JSON or
        unknown keys so callers never see a bare TypeError."""
        try:
            payload = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise PipelineError([Diagnostic("error", f"invalid JSON: {exc}",
                                            file=str(path))])
        if not isinstance(payload, dict):
            raise PipelineError([Diagnostic(
                "error", "config must be a JSON object", file=str(path))])
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(payload) - known)
        if unknown:
            raise PipelineError([
                Diagnostic("error", f"unknown config key {key!r}; expected "
                                    f"keys from {sorted(known)}",
                           file=str(path), column=key)
                for key in unknown])
        return cls(**payload)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ReportBundle:
    """The pipeline's single self-describing output.

    sections map section name to a JSON-ready payload whose "sources"
    entry lists the input files it was derived from; provenance maps every
    input file to its sha256 at analysis time.
    """

    version: str
    created: str
    config: dict
    provenance: dict
    sections: dict
    warnings: list

    def to_dict(self) -> dict:
        return {"version": self.version, "created": self.created,
                "config": self.config, "provenance": self.provenance,
                "sections": self.sections, "warnings": self.warnings}

    @classmethod
    def from_dict(cls, payload: dict) -> "ReportBundle":
        return cls(version=payload["version"], created=payload["created"],
                   config=payload["config"], provenance=payload["provenance"],
                   sections=payload["sections"],
                   warnings=payload["warnings"])

    def save(self, path) -> None:
        atomic_write_text(path, json.dumps(self.to_dict(), indent=1,
                                           sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "ReportBundle":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _check_csv(path, header, diags, min_rows=1):
    """Header/shape/parse checks shared by the validators; returns rows."""
    try:
        with open(path, newline="") as handle:
            reader = csv.reader(handle)
            try:
                first = next(reader)
            except StopIteration:
                diags.append(Diagnostic("error", "empty file", file=str(path)))
                return None
            if [c.strip() for c in first] != header:
                diags.append(Diagnostic(
                    "error", f"expected header {','.join(header)}",
                    file=str(path), column=first[0] if first else None))
                return None
            rows = []
            for i, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    rows.append([float(cell) for cell in row])
                except ValueError:
                    diags.append(Diagnostic(
                        "error", f"non-numeric value {row!r}",
                        file=str(path), row=i))
                    return None
    except OSError as exc:
        diags.append(Diagnostic("error", f"unreadable file: {exc}",
                                file=str(path)))
        return None
    if len(rows) < min_rows:
        diags.append(Diagnostic(
            "error", f"need at least {min_rows} data rows, got {len(rows)}",
            file=str(path)))
        return None
    return np.asarray(rows, dtype=float)


def validate_inputs(config: AnalysisConfig) -> list[Diagnostic]:
    """All schema/sanity violations at once; empty list means run-ready.

    Errors abort run_pipeline; warnings (e.g. populations outside the
    [-0.1, 1.1] tolerance) let it proceed with the offending trace
    excluded.
    """
    diags: list[Diagnostic] = []
    has_input = (config.decay_traces or config.frequency_series
                 or config.transmission_trace or config.two_tone_map)
    if not has_input:
        diags.append(Diagnostic("error", "empty dataset list: no inputs "
                                         "configured"))

    for path in config.decay_traces:
        data = _check_csv(path, DECAY_HEADER, diags, min_rows=2)
        if data is None:
            continue
        steps = np.diff(data[:, 0])
        for k in np.nonzero(steps <= 0)[0]:
            diags.append(Diagnostic(
                "error", f"non-monotone tau_s at value {data[k + 1, 0]!r}",
                file=str(path), row=int(k) + 3, column="tau_s"))
        bad = np.nonzero((data[:, 1] < -0.1) | (data[:, 1] > 1.1))[0]
        for k in bad:
            diags.append(Diagnostic(
                "warning", f"population {data[k, 1]} outside the "
                           "[-0.1, 1.1] tolerance; trace will be skipped",
                file=str(path), row=int(k) + 2, column="pe"))
        meta_path = sidecar_path(path)
        if not meta_path.exists():
            diags.append(Diagnostic("error", "missing JSON sidecar",
                                    file=str(meta_path)))
            continue
        try:
            meta = json.loads(meta_path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            diags.append(Diagnostic("error", f"bad sidecar: {exc}",
                                    file=str(meta_path)))
            continue
        kind = meta.get("kind")
        if kind not in _TRACE_KINDS:
            diags.append(Diagnostic(
                "error", f"kind must be one of {_TRACE_KINDS}, got {kind!r}",
                file=str(meta_path), column="kind"))
        elif kind == "cpmg" and int(meta.get("n_pulses", 0)) < 1:
            diags.append(Diagnostic("error", "cpmg trace needs n_pulses >= 1",
                                    file=str(meta_path), column="n_pulses"))

    if config.frequency_series:
        data = _check_csv(config.frequency_series, SERIES_HEADER, diags,
                          min_rows=8)
        if data is not None:
            steps = np.diff(data[:, 0])
            if np.any(steps <= 0):
                diags.append(Diagnostic("error", "timestamps must increase",
                                        file=config.frequency_series,
                                        column="t_s"))
            elif np.any(np.abs(steps - steps.mean()) > 0.01 * steps.mean()):
                diags.append(Diagnostic(
                    "error", "timestamps not uniform within 1%",
                    file=config.frequency_series, column="t_s"))

    if config.transmission_trace:
        _check_csv(config.transmission_trace, SPECTRUM_HEADER, diags,
                   min_rows=20)

    if config.two_tone_map:
        _check_csv(config.two_tone_map, TWO_TONE_HEADER, diags, min_rows=3)

    for key in ("f_ss", "lever_c", "f_r", "kappa", "t1", "f_q"):
        value = config.qubit.get(key)
        if value is not None and not value > 0:
            diags.append(Diagnostic(
                "error", f"qubit metadata {key} must be positive, "
                         f"got {value}", column=key))
    return diags


def run_pipeline(config: AnalysisConfig) -> ReportBundle:
    """Run the configured stages and write the report atomically.

    Raises PipelineError (writing nothing) when validation reports errors;
    soft warnings are carried into the report's warnings list.
    """
    diags = validate_inputs(config)
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        raise PipelineError(errors)
    warnings_list = [str(d) for d in diags]

    inputs: dict[str, str] = {}

    def _track(path) -> str:
        key = str(path)
        if key not in inputs:
            inputs[key] = sha256_of(path)
        return key

    qubit = config.qubit
    disp = None
    if qubit.get("f_ss") and qubit.get("lever_c") is not None:
        disp = QubitDispersion(f_ss=qubit["f_ss"], lever_c=qubit["lever_c"],
                               v_ss=qubit.get("v_ss", 0.0))

    sections: dict = {}
    stages = set(config.stages)

    # ---- per-trace decay fits -------------------------------------------
    decay_fits: list[dict] = []
    relax_by_bias: dict[float, dict] = {}
    if "decay" in stages and config.decay_traces:
        loaded = []
        for path in config.decay_traces:
            try:
                trace, meta = load_decay_trace(path)
            except ValueError as exc:
                warnings_list.append(f"[warning] {path}: skipped ({exc})")
                continue
            _track(path)
            _track(sidecar_path(path))
            loaded.append((str(path), trace, meta))

        for path, trace, meta in loaded:
            if trace.kind != "relaxation":
                continue
            fit = fit_relaxation(trace)
            record = _fit_record(path, trace, meta, fit)
            decay_fits.append(record)
            relax_by_bias[_bias_of(meta)] = record
        for path, trace, meta in loaded:
            if trace.kind == "relaxation":
                continue
            try:
                if trace.kind == "ramsey":
                    fit = fit_ramsey(trace)
                else:
                    t1 = _t1_for(_bias_of(meta), relax_by_bias, qubit)
                    if t1 is None:
                        warnings_list.append(
                            f"[warning] {path}: no T1 available for this "
                            "bias and no qubit.t1 fallback; trace skipped")
                        continue
                    fit = fit_cpmg(trace, t1)
            except (FitError, ValueError) as exc:
                warnings_list.append(f"[warning] {path}: fit failed ({exc})")
                continue
            decay_fits.append(_fit_record(path, trace, meta, fit))
        sections["decay_fits"] = {
            "fits": decay_fits,
            "sources": sorted({f["file"] for f in decay_fits}
                              | {str(sidecar_path(f["file"]))
                                 for f in decay_fits}),
        }

    # ---- T_phi vs N scaling ---------------------------------------------
    if "scaling" in stages and decay_fits:
        scaling_rows = []
        by_bias: dict[float, list[dict]] = {}
        for record in decay_fits:
            if record["n_pulses"] >= 1 and record["params"].get("t_phi"):
                by_bias.setdefault(record["bias_mv"], []).append(record)
        for bias, records in sorted(by_bias.items()):
            points = [(r["n_pulses"], r["params"]["t_phi"]) for r in records]
            if len(points) < 3:
                continue
            try:
                scaling = fit_scaling(points)
            except ScalingError as exc:
                warnings_list.append(
                    f"[warning] scaling at bias {bias} mV: {exc}")
                continue
            scaling_rows.append({
                "bias_mv": bias, "beta": scaling.beta,
                "alpha": scaling.alpha, "beta_err": scaling.beta_err,
                "alpha_err": scaling.alpha_err,
                "n_points": len(points),
            })
        if scaling_rows:
            sections["scaling"] = {
                "fits": scaling_rows,
                "sources": sections["decay_fits"]["sources"],
            }

    # ---- PSD reconstruction and conversions ------------------------------
    if "psd" in stages and decay_fits:
        psd_rows = []
        for record in decay_fits:
            params = record["params"]
            if record["n_pulses"] >= 1 and params.get("t_phi"):
                seq = PulseSequence(n_pulses=record["n_pulses"],
                                    tau=params["t_phi"])
                point = reconstruct_psd_point(params["t_phi"], seq)
                row = {"freq_hz": point.freq, "psd": point.value,
                       "units": point.units, "n_pulses": record["n_pulses"],
                       "bias_mv": record["bias_mv"], "source": record["file"]}
                psd_rows.append(row)
                if disp is not None:
                    dv = record["bias_mv"] * 1e-3 - disp.v_ss
                    lever = lever_arm(disp, dv)
                    if lever != 0.0:
                        volt = to_voltage_noise(point, lever)
                        psd_rows.append({
                            "freq_hz": volt.freq, "psd": volt.value,
                            "units": volt.units,
                            "n_pulses": record["n_pulses"],
                            "bias_mv": record["bias_mv"],
                            "source": record["file"]})
            elif record["kind"] == "relaxation" and params.get("t1"):
                f_q = qubit.get("f_q") or qubit.get("f_ss")
                if disp is not None:
                    f_q = qubit_frequency(
                        disp, record["bias_mv"] * 1e-3 - disp.v_ss)
                if f_q:
                    point = transverse_noise(params["t1"], f_q)
                    psd_rows.append({
                        "freq_hz": point.freq, "psd": point.value,
                        "units": point.units, "n_pulses": 0,
                        "bias_mv": record["bias_mv"],
                        "source": record["file"]})
        if psd_rows:
            freq_points = [r for r in psd_rows if r["units"] == "freq_noise"
                           and r["n_pulses"] >= 1]
            fit = None
            if len(freq_points) >= 3 and len({r["freq_hz"]
                                              for r in freq_points}) >= 3:
                fit = powerlaw_fit([(r["freq_hz"], r["psd"])
                                    for r in freq_points])
            sections["psd"] = {
                "points": psd_rows,
                "powerlaw": fit,
                "sources": sorted({r["source"] for r in psd_rows}),
            }

    # ---- low-frequency periodogram ---------------------------------------
    if "lowfreq" in stages and config.frequency_series:
        series = load_frequency_series(config.frequency_series)
        _track(config.frequency_series)
        points = periodogram(series)
        fit = powerlaw_fit(points) if len(points) >= 3 else None
        sections["low_frequency"] = {
            "points": [{"freq_hz": p.freq, "psd": p.value, "units": p.units}
                       for p in points],
            "powerlaw": fit,
            "sources": [str(config.frequency_series)],
        }

    # ---- thermal-model curves ---------------------------------------------
    thermal_keys = ("f_q", "f_r", "kappa", "chi", "t1")
    if "thermal" in stages and config.temperatures_k \
            and all(qubit.get(k) is not None for k in thermal_keys):
        model = ThermalModel(f_q=qubit["f_q"], f_r=qubit["f_r"],
                             kappa=qubit["kappa"], chi=qubit["chi"],
                             t1_zero=qubit["t1"])
        rows = []
        for temp in config.temperatures_k:
            n_th = photon_occupation(model.f_r, temp)
            rows.append({
                "temp_k": temp,
                "t1_s": t1_vs_temperature(model, temp),
                "pe": thermal_population(model.f_q, temp),
                "n_th": n_th,
                "gamma_phi": resonator_dephasing(model, n_th),
            })
        sections["thermal"] = {"curves": rows, "sources": []}

    # ---- spectroscopy fits -------------------------------------------------
    if "spectro" in stages:
        spectro_section: dict = {"sources": []}
        if config.transmission_trace and qubit.get("f_r") \
                and qubit.get("kappa"):
            trace = load_spectroscopy_trace(config.transmission_trace)
            _track(config.transmission_trace)
            result = fit_transmission(
                trace, {"f_r": qubit["f_r"], "kappa": qubit["kappa"]})
            spectro_section["transmission"] = result
            spectro_section["sources"].append(str(config.transmission_trace))
        if config.two_tone_map:
            table = load_two_tone_map(config.two_tone_map)
            _track(config.two_tone_map)
            points = _ridge_points(table)
            if len(points) >= 3:
                fitted, report = fit_dispersion(points, full_output=True)
                spectro_section["dispersion"] = {
                    "f_ss": fitted.f_ss, "lever_c": fitted.lever_c,
                    "v_ss": fitted.v_ss, **report}
                spectro_section["sources"].append(str(config.two_tone_map))
        if len(spectro_section) > 1:
            sections["spectro"] = spectro_section

    sections["reference_charge_noise"] = {
        "rows": load_charge_noise_table(),
        "sources": [],
        "note": "literature comparison values shipped as package data",
    }

    report = ReportBundle(
        version=__version__,
        created=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        config=config.to_dict(),
        provenance={"inputs": inputs},
        sections=sections,
        warnings=warnings_list,
    )
    _write_outputs(config, report)
    return report


def verify_report_provenance(report: ReportBundle) -> dict[str, str]:
    """Check every section's sources against the recorded input hashes.

    Returns {section: "ok" | "missing: path" | "changed: path"}; deleting
    or editing an input invalidates exactly the sections derived from it.
    """
    status = {}
    recorded = report.provenance.get("inputs", {})
    for name, payload in report.sections.items():
        verdict = "ok"
        for source in payload.get("sources", []):
            path = Path(source)
            if not path.exists():
                verdict = f"missing: {source}"
                break
            if sha256_of(path) != recorded.get(source):
                verdict = f"changed: {source}"
                break
        status[name] = verdict
    return status


def _write_outputs(config: AnalysisConfig, report: ReportBundle) -> None:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    report.save(out / "report.json")

    decay = report.sections.get("decay_fits")
    if decay:
        rows = []
        for f in decay["fits"]:
            p = f["params"]
            rows.append([f["file"], f["kind"], f["n_pulses"], f["bias_mv"],
                         p.get("t1"), p.get("t2"), p.get("t_phi"),
                         p.get("stretch"), p.get("amplitude"),
                         p.get("offset"), p.get("detuning")])
        header = ["file", "kind", "n_pulses", "bias_mv", "t1_s", "t2_s",
                  "t_phi_s", "stretch", "amplitude", "offset", "detuning_hz"]
        text = ",".join(header) + "\n" + "\n".join(
            ",".join("" if v is None else str(v) for v in row)
            for row in rows) + "\n"
        atomic_write_text(out / "coherence_fits.csv", text)

    psd = report.sections.get("psd")
    if psd:
        from .noisespec import PSDPoint
        points = [PSDPoint(freq=r["freq_hz"], value=r["psd"],
                           units=r["units"]) for r in psd["points"]]
        atomic_write_text(out / "psd_points.csv", format_psd_csv(points))

    lowfreq = report.sections.get("low_frequency")
    if lowfreq:
        from .noisespec import PSDPoint
        points = [PSDPoint(freq=r["freq_hz"], value=r["psd"],
                           units=r["units"]) for r in lowfreq["points"]]
        atomic_write_text(out / "periodogram.csv", format_psd_csv(points))

    thermal = report.sections.get("thermal")
    if thermal:
        write_thermal_csv(out / "thermal_model.csv",
                          [(r["temp_k"], r["t1_s"], r["pe"], r["n_th"],
                            r["gamma_phi"]) for r in thermal["curves"]])


def _fit_record(path: str, trace, meta: dict, fit) -> dict:
    params = {k: getattr(fit, k) for k in
              ("t1", "t2", "t_phi", "stretch", "amplitude", "offset",
               "detuning", "phase")}
    return {
        "file": str(path),
        "kind": trace.kind,
        "n_pulses": trace.n_pulses,
        "bias_mv": _bias_of(meta),
        "temperature_mk": meta.get("temperature_mk"),
        "params": params,
        "errors": {k: float(v) for k, v in fit.errors.items()},
        "flags": list(fit.flags),
    }


def _bias_of(meta: dict) -> float:
    bias = meta.get("bias_mv")
    return 0.0 if bias is None else float(bias)


def _t1_for(bias: float, relax_by_bias: dict, qubit: dict):
    record = relax_by_bias.get(bias)
    if record is not None:
        return record["params"]["t1"]
    if relax_by_bias and len(relax_by_bias) == 1:
        return next(iter(relax_by_bias.values()))["params"]["t1"]
    return qubit.get("t1")


def _ridge_points(table: np.ndarray) -> list[tuple[float, float]]:
    """Qubit-line points from a two-tone map: per voltage, the frequency
    with the strongest phase response relative to that column's median."""
    points = []
    for voltage in np.unique(table[:, 0]):
        rows = table[table[:, 0] == voltage]
        response = np.abs(rows[:, 2] - np.median(rows[:, 2]))
        points.append((float(voltage), float(rows[np.argmax(response), 1])))
    return points
