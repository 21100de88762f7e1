"""Figure reproduction: one CSV per curve plus a plain-text plot script.

The inventory lives in ``data/figures.json``.  Each figure fixes the bound
(method and norm), the driving time and the kappa*tau range; each curve names
a state spec and a channel from the manifest's channel table.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .channels import ChannelConfig
from .csvio import point_rows, render, write_text
from .errors import UnknownFigure
from .speedlimit import QslRequest, kappa_tau_sweep
from .statespec import parse_state

DEFAULT_POINTS = 200


@dataclass(frozen=True)
class Curve:
    id: str
    state: str
    channel: ChannelConfig
    kappa_tau: tuple[float, float]


@dataclass(frozen=True)
class Figure:
    id: str
    title: str
    request: QslRequest
    axes: str
    curves: tuple[Curve, ...]


@lru_cache(maxsize=1)
def manifest() -> dict:
    text = resources.files("qslkit").joinpath("data/figures.json").read_text(encoding="utf-8")
    return json.loads(text)


def figure_ids() -> list[str]:
    return list(manifest()["figures"])


def get_figure(fig_id: str) -> Figure:
    m = manifest()
    key = fig_id.lower()
    if key not in m["figures"]:
        raise UnknownFigure(f"unknown figure {fig_id!r}; known: {', '.join(m['figures'])}")
    spec = m["figures"][key]
    chans = {name: ChannelConfig(**cfg) for name, cfg in m["channels"].items()}
    req = QslRequest(method=spec["method"], norm=spec.get("norm", "op"), tau=float(spec["tau"]))
    rng = tuple(spec["kappa_tau"])
    curves = tuple(Curve(c["id"], c["state"], chans[c["channel"]], tuple(c.get("kappa_tau", rng))) for c in spec["curves"])
    return Figure(key, spec["title"], req, spec["axes"], curves)


def curve_grid(curve: Curve, points: int) -> np.ndarray:
    lo, hi = curve.kappa_tau
    return np.linspace(lo, hi, points)


def curve_csv(fig: Figure, curve: Curve, points: int = DEFAULT_POINTS) -> str:
    pts = kappa_tau_sweep(parse_state(curve.state), curve.channel, fig.request, curve_grid(curve, points))
    return render(point_rows(pts))


def plot_script(fig: Figure) -> str:
    """A gnuplot-style command script reading the CSVs by column index
    (1 kappa_tau, 2 tau_qsl, 3 cl1, 4 s_l, 5 m_cl)."""
    lines = [
        f"# {fig.id}: {fig.title}",
        f"# method={fig.request.method} norm={fig.request.norm} tau={fig.request.tau:.12g}",
        'set datafile separator ","',
        "set key autotitle columnhead",
    ]
    panels = []
    if fig.axes in ("kappa_tau", "both"):
        panels.append(("kappa*tau", 1))
    if fig.axes in ("parametric", "both"):
        panels.append(("M_Cl", 5))
    if len(panels) > 1:
        lines.append(f"set multiplot layout 1,{len(panels)}")
    for xlabel, col in panels:
        lines.append(f'set xlabel "{xlabel}"')
        lines.append('set ylabel "tau_QSL"')
        parts = [f'"{c.id}.csv" using {col}:2 with lines title "{c.id}"' for c in fig.curves]
        lines.append("plot " + ", \\\n     ".join(parts))
    if len(panels) > 1:
        lines.append("unset multiplot")
    return "\n".join(lines) + "\n"


def generate(fig_id: str, out_dir, points: int = DEFAULT_POINTS, threads: int = 1) -> list[Path]:
    """Write every curve of ``fig_id`` and its plot script under ``out_dir/fig_id``.

    Curves may be computed concurrently; files are written afterwards in
    manifest order, so the output does not depend on ``threads``.
    """
    fig = get_figure(fig_id)
    if points < 2:
        raise ValueError("need at least two grid points per curve")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            texts = list(pool.map(lambda c: curve_csv(fig, c, points), fig.curves))
    else:
        texts = [curve_csv(fig, c, points) for c in fig.curves]
    base = Path(out_dir) / fig.id
    written = [write_text(base / f"{c.id}.csv", t) for c, t in zip(fig.curves, texts)]
    written.append(write_text(base / "plot.gp", plot_script(fig)))
    return written
