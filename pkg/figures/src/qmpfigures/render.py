"""Figure rendering from sweep CSVs.

Five figure kinds, all reading plain CSV (no other coupling to the
circuit package):

  fig2  improvement vs n, one series per r, log y, y = r bound lines
  fig3  improvement vs Xi (log x), one series per r, at the largest n
  fig5  non-lookup cost fraction vs n, one series per r
  fig6  improvement vs n per r, one panel per (m, Xi) pair
  fig8  two panels over N_orb: non-lookup fraction and input bits

Rendering is a pure function of the CSV bytes and the spec: fixed
style, sorted group keys, no timestamps in the output files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

# Fixed salt so SVG element ids do not vary run to run.
plt.rcParams["svg.hashsalt"] = "qmpfigures"

FIGURE_KINDS = ("fig2", "fig3", "fig5", "fig6", "fig8")

_SWEEP_COLUMNS = ("n", "m", "xi", "r", "improvement",
                  "fraction_non_lookup")
_SPARSE_COLUMNS = ("n_orb", "n_terms", "input_bits",
                   "fraction_non_lookup")

_REQUIRED = {
    "fig2": _SWEEP_COLUMNS,
    "fig3": _SWEEP_COLUMNS,
    "fig5": _SWEEP_COLUMNS,
    "fig6": _SWEEP_COLUMNS,
    "fig8": _SPARSE_COLUMNS,
}


@dataclass(frozen=True, slots=True)
class FigureSpec:
    csv_path: str
    kind: str
    out_base: str  # extension-less; .png and .svg are written
    log_y: bool = True

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")


def load_rows(csv_path: str, kind: str) -> list[dict[str, float]]:
    with open(csv_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in _REQUIRED[kind] if c not in header]
        if missing:
            raise ValueError(f"{csv_path}: missing columns {missing}")
        rows = [{c: float(row[c]) for c in _REQUIRED[kind]}
                for row in reader]
    if not rows:
        raise ValueError(f"{csv_path}: no rows")
    return rows


def _groups(rows, key_fields):
    grouped: dict[tuple, list] = {}
    for row in rows:
        grouped.setdefault(tuple(row[k] for k in key_fields),
                           []).append(row)
    return dict(sorted(grouped.items()))


def _series(rows, key_fields, x_field, y_field):
    out = []
    for key, members in _groups(rows, key_fields).items():
        points = sorted((row[x_field], row[y_field]) for row in members)
        out.append({"key": list(key), "points": points})
    return out


def series_structure(kind: str, rows: list[dict[str, float]]) -> dict:
    """Label/shape summary of what render() would draw (golden-testable)."""
    if kind == "fig2":
        low_xi = min(row["xi"] for row in rows)
        sel = [row for row in rows if row["xi"] == low_xi]
        series = _series(sel, ("r",), "n", "improvement")
        return {"kind": kind, "xi": low_xi,
                "series": [{"r": s["key"][0], "n_points": len(s["points"]),
                            "bound": s["key"][0]} for s in series]}
    if kind == "fig3":
        top_n = max(row["n"] for row in rows)
        sel = [row for row in rows if row["n"] == top_n]
        series = _series(sel, ("r",), "xi", "improvement")
        return {"kind": kind, "n": top_n,
                "series": [{"r": s["key"][0],
                            "xi_points": len(s["points"])}
                           for s in series]}
    if kind == "fig5":
        low_xi = min(row["xi"] for row in rows)
        sel = [row for row in rows if row["xi"] == low_xi]
        series = _series(sel, ("r",), "n", "fraction_non_lookup")
        return {"kind": kind, "xi": low_xi,
                "series": [{"r": s["key"][0], "n_points": len(s["points"])}
                           for s in series]}
    if kind == "fig6":
        panels = []
        for (m, xi), members in _groups(rows, ("m", "xi")).items():
            series = _series(members, ("r",), "n", "improvement")
            panels.append({"m": m, "xi": xi,
                           "series": [{"r": s["key"][0],
                                       "n_points": len(s["points"])}
                                      for s in series]})
        return {"kind": kind, "panels": panels}
    if kind == "fig8":
        xs = sorted(row["n_orb"] for row in rows)
        return {"kind": kind, "n_orb_points": len(xs),
                "panels": ["fraction_non_lookup", "input_bits"]}
    raise ValueError(f"unknown figure kind {kind!r}")


def _save(fig, out_base: str) -> list[str]:
    written = []
    for ext in ("png", "svg"):
        path = f"{out_base}.{ext}"
        fig.savefig(path, metadata=({"Date": None} if ext == "svg"
                                    else None))
        written.append(path)
    plt.close(fig)
    return written


def _line_style(index: int):
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    return {"color": colors[index % len(colors)], "marker": "o",
            "markersize": 3}


def render(spec: FigureSpec) -> list[str]:
    """Write <out_base>.png and .svg; returns the written paths."""
    rows = load_rows(spec.csv_path, spec.kind)
    structure = series_structure(spec.kind, rows)
    if spec.kind in ("fig2", "fig5"):
        sel = [row for row in rows if row["xi"] == structure["xi"]]
        y_field = ("improvement" if spec.kind == "fig2"
                   else "fraction_non_lookup")
        fig, ax = plt.subplots(figsize=(5.5, 4))
        for i, s in enumerate(_series(sel, ("r",), "n", y_field)):
            xs, ys = zip(*s["points"])
            r = int(s["key"][0])
            ax.plot(xs, ys, label=f"r = {r}", **_line_style(i))
            if spec.kind == "fig2":
                ax.axhline(r, linestyle="--", linewidth=0.7, alpha=0.5,
                           color=_line_style(i)["color"])
        ax.set_xlabel("input bits n")
        ax.set_ylabel("improvement factor" if spec.kind == "fig2"
                      else "non-lookup cost fraction")
        if spec.log_y:
            ax.set_yscale("log")
        ax.legend(fontsize=8)
    elif spec.kind == "fig3":
        sel = [row for row in rows if row["n"] == structure["n"]]
        fig, ax = plt.subplots(figsize=(5.5, 4))
        for i, s in enumerate(_series(sel, ("r",), "xi", "improvement")):
            xs, ys = zip(*s["points"])
            ax.plot(xs, ys, label=f"r = {int(s['key'][0])}",
                    **_line_style(i))
        ax.set_xscale("log")
        ax.set_xlabel("T-gate cost ratio Ξ")
        ax.set_ylabel("improvement factor")
        if spec.log_y:
            ax.set_yscale("log")
        ax.legend(fontsize=8)
    elif spec.kind == "fig6":
        panels = structure["panels"]
        cols = min(len(panels), 3)
        prows = (len(panels) + cols - 1) // cols
        fig, axes = plt.subplots(prows, cols,
                                 figsize=(4 * cols, 3.2 * prows),
                                 squeeze=False)
        grouped = _groups(rows, ("m", "xi"))
        for idx, ((m, xi), members) in enumerate(grouped.items()):
            ax = axes[idx // cols][idx % cols]
            for i, s in enumerate(_series(members, ("r",), "n",
                                          "improvement")):
                xs, ys = zip(*s["points"])
                ax.plot(xs, ys, label=f"r = {int(s['key'][0])}",
                        **_line_style(i))
            ax.set_title(f"m = {int(m)}, Ξ = {xi:g}", fontsize=9)
            ax.set_xlabel("n")
            ax.set_ylabel("improvement")
            if spec.log_y:
                ax.set_yscale("log")
            ax.legend(fontsize=7)
        for idx in range(len(grouped), prows * cols):
            axes[idx // cols][idx % cols].axis("off")
    else:  # fig8
        pts = sorted((row["n_orb"], row["fraction_non_lookup"],
                      row["input_bits"]) for row in rows)
        xs = [p[0] for p in pts]
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
        ax1.plot(xs, [p[1] for p in pts], **_line_style(0))
        ax1.set_xlabel("spin-orbitals")
        ax1.set_ylabel("non-lookup cost fraction")
        ax2.step(xs, [p[2] for p in pts], where="post", **_line_style(1))
        ax2.set_xlabel("spin-orbitals")
        ax2.set_ylabel("lookup input bits")
    fig.tight_layout()
    Path(spec.out_base).parent.mkdir(parents=True, exist_ok=True)
    return _save(fig, spec.out_base)
