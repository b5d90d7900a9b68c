"""CSV tables, plot scripts and channel dump files."""
from __future__ import annotations

import csv
import dataclasses
import io
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from ..channels import ArrayGeometry, MultiUserChannel
from ..errors import HybdError
from .sweep import SweepRow

CSV_COLUMNS = (
    "scenario", "scheme", "channel_kind", "sweep_param", "sweep_value", "snr_db",
    "trials", "mean_sum_rate_bps_hz", "stderr_sum_rate", "mean_per_user_rate_min",
    "mean_per_user_rate_max", "feasible",
)
CHANNEL_SCHEMA = 1
CHANNEL_HEADER = f"# hybd channel dump schema={CHANNEL_SCHEMA}"


class OutputError(HybdError, OSError):
    pass


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return "nan" if math.isnan(x) else format(x, ".12g")
    return str(x)


def format_csv(rows: Sequence[SweepRow]) -> str:
    if not rows:
        raise ValueError("refusing to write an empty table")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def emit_csv(rows: Sequence[SweepRow], path: str | Path) -> Path:
    text = format_csv(rows)
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


PLOT_TEMPLATE = '''\
"""Plot {csv_name}. Display only: all numbers come from the CSV."""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

series = defaultdict(list)
with open({csv_path!r}, newline="") as fh:
    for row in csv.DictReader(fh):
        if row["feasible"] != "1":
            continue
        if row["sweep_param"] in ("none", "snr"):
            key, x = row["scheme"], float(row["snr_db"])
        else:
            key = "{{}} @ {{}} dB".format(row["scheme"], row["snr_db"])
            x = float(row["sweep_value"])
        series[key].append((x, float(row["mean_sum_rate_bps_hz"])))

fig, ax = plt.subplots()
for key, pts in sorted(series.items()):
    pts.sort()
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=key)
ax.set_xlabel({xlabel!r})
ax.set_ylabel("sum spectral efficiency (bits/s/Hz)")
ax.grid(True)
ax.legend()
fig.savefig({png_path!r}, dpi=150)
'''


def emit_plot_script(csv_path: str | Path, script_path: str | Path,
                     sweep_param: str = "none") -> Path:
    csv_path, script_path = Path(csv_path), Path(script_path)
    xlabel = {"n_s": "streams per user", "k": "users"}.get(sweep_param, "SNR (dB)")
    text = PLOT_TEMPLATE.format(csv_name=csv_path.name, csv_path=str(csv_path),
                                xlabel=xlabel, png_path=str(csv_path.with_suffix(".png")))
    try:
        script_path.write_text(text)
    except OSError as exc:
        raise OutputError(f"cannot write {script_path}: {exc.strerror or exc}") from exc
    return script_path


# ---------------------------------------------------------------------------
# channel dumps
#
#   # hybd channel dump schema=1
#   kind <rayleigh|mmwave|single_path>
#   master_seed <int>
#   trial <int>
#   dims <K> <N_MS> <N_BS>
#   beta <K floats>
#   user <k>                    (repeated K times, followed by N_MS lines)
#   <re> <im> <re> <im> ...     (one line per matrix row, N_BS pairs)
# ---------------------------------------------------------------------------

def format_channel(channel: MultiUserChannel, master_seed: int, trial: int) -> str:
    lines = [
        CHANNEL_HEADER,
        f"kind {channel.kind}",
        f"master_seed {master_seed}",
        f"trial {trial}",
        "dims {} {} {}".format(channel.users, channel.n_ms, channel.n_bs),
        "beta " + " ".join(repr(float(b)) for b in channel.large_scale),
    ]
    for k in range(channel.users):
        lines.append(f"user {k}")
        for row in channel.per_user_matrix[k]:
            pairs = np.column_stack([row.real, row.imag]).ravel()
            lines.append(" ".join(repr(float(x)) for x in pairs))
    return "\n".join(lines) + "\n"


def write_channel(channel: MultiUserChannel, path: str | Path, master_seed: int,
                  trial: int) -> Path:
    path = Path(path)
    try:
        path.write_text(format_channel(channel, master_seed, trial))
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


@dataclasses.dataclass(frozen=True)
class ChannelDump:
    kind: str
    master_seed: int
    trial: int
    large_scale: np.ndarray
    per_user_matrix: np.ndarray

    def to_channel(self) -> MultiUserChannel:
        k, n_ms, n_bs = self.per_user_matrix.shape
        return MultiUserChannel(self.per_user_matrix, self.large_scale,
                                ArrayGeometry.ula(n_bs), ArrayGeometry.ula(n_ms),
                                kind=self.kind)


def read_channel(path: str | Path) -> ChannelDump:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CHANNEL_HEADER:
        raise ValueError(f"{path}: missing or unsupported schema header")
    fields = {}
    i = 1
    while i < len(lines) and not lines[i].startswith("user "):
        key, _, rest = lines[i].partition(" ")
        fields[key] = rest
        i += 1
    users, n_ms, n_bs = (int(x) for x in fields["dims"].split())
    h = np.empty((users, n_ms, n_bs), dtype=complex)
    for k in range(users):
        if lines[i] != f"user {k}":
            raise ValueError(f"{path}: expected 'user {k}' at line {i + 1}")
        i += 1
        for m in range(n_ms):
            vals = np.array(lines[i].split(), dtype=float)
            if vals.size != 2 * n_bs:
                raise ValueError(f"{path}: line {i + 1} has {vals.size} values")
            h[k, m] = vals[0::2] + 1j * vals[1::2]
            i += 1
    beta = np.array(fields["beta"].split(), dtype=float)
    return ChannelDump(fields["kind"], int(fields["master_seed"]), int(fields["trial"]),
                       beta, h)
