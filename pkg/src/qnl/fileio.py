"""CSV/JSON file formats and atomic writes.

Formats, one header per data kind:

- decay trace:       ``tau_s,pe`` plus a JSON sidecar (same stem, .json)
                     with ``{kind, n_pulses, bias_mv, temperature_mk}``
- spectroscopy:      ``freq_hz,amp``
- two-tone map:      ``voltage_v,freq_hz,phase_rad``
- PSD table:         ``freq_hz,psd,units``
- frequency series:  ``t_s,freq_hz``
- thermal curves:    ``temp_k,t1_s,pe,n_th,gamma_phi``

All writers go through an atomic temp-file + rename so partially written
outputs never appear under the final name.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from importlib import resources
from pathlib import Path

import numpy as np

from .decayfit import DecayTrace
from .noisespec import FrequencySeries, PSDPoint

DECAY_HEADER = ["tau_s", "pe"]
SPECTRUM_HEADER = ["freq_hz", "amp"]
TWO_TONE_HEADER = ["voltage_v", "freq_hz", "phase_rad"]
PSD_HEADER = ["freq_hz", "psd", "units"]
SERIES_HEADER = ["t_s", "freq_hz"]
THERMAL_HEADER = ["temp_k", "t1_s", "pe", "n_th", "gamma_phi"]


def atomic_write_text(path, text: str) -> None:
    """Write text to `path` via a temp file + rename in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_of(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def sidecar_path(trace_path) -> Path:
    return Path(trace_path).with_suffix(".json")


def _read_rows(path, header: list[str]) -> np.ndarray:
    """Numeric CSV body after an exact-header check."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            first = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if [c.strip() for c in first] != header:
            raise ValueError(f"{path}: expected header {','.join(header)}, "
                             f"got {','.join(first)}")
        rows = [[float(cell) for cell in row] for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def _format_csv(header: list[str], rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def load_decay_trace(path) -> tuple[DecayTrace, dict]:
    """Read a tau_s,pe trace and its JSON sidecar; returns (trace, meta)."""
    data = _read_rows(path, DECAY_HEADER)
    meta_path = sidecar_path(path)
    if not meta_path.exists():
        raise FileNotFoundError(f"{path}: missing metadata sidecar "
                                f"{meta_path.name}")
    meta = json.loads(meta_path.read_text())
    trace = DecayTrace(times=data[:, 0], populations=data[:, 1],
                       kind=meta["kind"], n_pulses=int(meta.get("n_pulses", 0)))
    return trace, meta


def write_decay_trace(path, trace: DecayTrace, bias_mv: float = 0.0,
                      temperature_mk: float | None = None) -> None:
    rows = zip(trace.times.tolist(), trace.populations.tolist())
    atomic_write_text(path, _format_csv(DECAY_HEADER, rows))
    meta = {"kind": trace.kind, "n_pulses": trace.n_pulses,
            "bias_mv": bias_mv, "temperature_mk": temperature_mk}
    atomic_write_text(sidecar_path(path), json.dumps(meta, indent=1) + "\n")


def load_spectroscopy_trace(path) -> np.ndarray:
    """(n, 2) array of (freq_hz, amp)."""
    return _read_rows(path, SPECTRUM_HEADER)


def load_two_tone_map(path) -> np.ndarray:
    """(n, 3) array of (voltage_v, freq_hz, phase_rad)."""
    return _read_rows(path, TWO_TONE_HEADER)


def load_frequency_series(path) -> FrequencySeries:
    data = _read_rows(path, SERIES_HEADER)
    return FrequencySeries(timestamps=data[:, 0], freqs=data[:, 1])


def write_frequency_series(path, series: FrequencySeries) -> None:
    rows = zip(series.timestamps.tolist(), series.freqs.tolist())
    atomic_write_text(path, _format_csv(SERIES_HEADER, rows))


def load_psd_csv(path) -> list[PSDPoint]:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        first = next(reader)
        if [c.strip() for c in first] != PSD_HEADER:
            raise ValueError(f"{path}: expected header {','.join(PSD_HEADER)}")
        points = [PSDPoint(freq=float(row[0]), value=float(row[1]),
                           units=row[2].strip())
                  for row in reader if row]
    if not points:
        raise ValueError(f"{path}: no data rows")
    return points


def write_psd_csv(path, points) -> None:
    rows = [(p.freq, p.value, p.units) for p in points]
    atomic_write_text(path, _format_csv(PSD_HEADER, rows))


def format_psd_csv(points) -> str:
    return _format_csv(PSD_HEADER, [(p.freq, p.value, p.units)
                                    for p in points])


def write_thermal_csv(path, rows) -> None:
    """rows: iterable of (temp_k, t1_s, pe, n_th, gamma_phi)."""
    atomic_write_text(path, _format_csv(THERMAL_HEADER, rows))


def load_charge_noise_table() -> list[dict]:
    """Literature voltage-noise comparison rows shipped as package data."""
    text = (resources.files("qnl") / "reference" /
            "charge_noise_table.csv").read_text()
    return list(csv.DictReader(io.StringIO(text)))
