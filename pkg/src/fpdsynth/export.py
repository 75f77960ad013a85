"""CSV tables and SVG plots of sweep results."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .cmatrix import SweepResult

__all__ = ["format_csv", "write_csv", "render_svg", "write_svg"]

DB_FLOOR = -400.0


def format_csv(result: SweepResult) -> str:
    p = result.n_ports
    cols = ["f_Hz"]
    for i in range(1, p + 1):
        for j in range(1, p + 1):
            cols += [f"S{i}{j}_dB", f"S{i}{j}_deg"]
    lines = [",".join(cols)]
    mag = np.abs(result.s)
    with np.errstate(divide="ignore"):
        db = np.maximum(20.0 * np.log10(mag), DB_FLOOR)
    deg = np.rad2deg(np.angle(result.s))
    for k, f in enumerate(result.freqs):
        row = [f"{f:.10e}"]
        for i in range(p):
            for j in range(p):
                row += [f"{db[k, i, j]:.9e}", f"{deg[k, i, j]:.9e}"]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_csv(result: SweepResult, path) -> Path:
    path = Path(path)
    path.write_text(format_csv(result))
    return path


def render_svg(result: SweepResult, title: str = "", overlay: SweepResult | None = None) -> str:
    """|S11| and |S_k1| in dB against GHz. ``overlay`` is drawn dashed."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "fpdsynth", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for res, style in ((result, "-"), (overlay, "--")):
            if res is None:
                continue
            ghz = res.freqs / 1e9
            for k in range(1, res.n_ports + 1):
                with np.errstate(divide="ignore"):
                    y = np.maximum(res.db(k, 1), -80.0)
                ax.plot(ghz, y, style, lw=1.2, label=f"S{k}1" + (" (overlay)" if style == "--" else ""))
        ax.set_xlabel("Frequency (GHz)")
        ax.set_ylabel("Magnitude (dB)")
        ax.set_ylim(-60, 2)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="lower right", fontsize=8)
        if title:
            ax.set_title(title)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    return buf.getvalue()


def write_svg(result: SweepResult, path, **kw) -> Path:
    path = Path(path)
    path.write_text(render_svg(result, **kw))
    return path
