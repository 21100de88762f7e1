"""CSV output shared by the CLI and the figure generator."""

from __future__ import annotations

import io
from pathlib import Path
from typing import Iterable, Sequence

HEADER = ("kappa_tau", "tau_qsl", "cl1", "s_l", "m_cl")


def fmt(x: float) -> str:
    # adding 0.0 turns -0.0 into 0.0 so output never depends on signed zeros
    return "%.12g" % (float(x) + 0.0)


def render(rows: Iterable[Sequence[float]], header: Sequence[str] = HEADER) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def point_rows(points) -> list[tuple[float, ...]]:
    return [(p.t, p.tau_qsl, p.cl1, p.s_l, p.m_cl) for p in points]


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path
