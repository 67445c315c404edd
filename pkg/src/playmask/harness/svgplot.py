"""Deterministic SVG line charts for aggregate metrics.

Hand-rolled on purpose: identical input CSVs must yield byte-identical SVG,
so no plotting library (with its embedded versions and ids) is involved.
Each chart draws one series per run: a mean line plus a standard-deviation
band.
"""

from __future__ import annotations

from pathlib import Path

from .run import read_aggregate

_W, _H = 640, 400
_ML, _MR, _MT, _MB = 64, 16, 28, 44
_COLORS = ("#1b6ca8", "#c0392b", "#1e8449", "#8e44ad", "#b7950b", "#566573")

_METRICS = {
    "success": ("success_mean", "success_std", "success rate"),
    "infeasible": ("infeasible_mean", "infeasible_std", "cumulative infeasible attempts"),
    "loss": ("loss_mean", None, "mean TD loss"),
}


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    raw = span / n
    mag = 10.0 ** int(f"{raw:e}".split("e")[1])
    for mult in (1, 2, 5, 10):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = step * int(lo / step)
    if first < lo - 1e-12:
        first += step
    ticks = []
    v = first
    while v <= hi + 1e-12:
        ticks.append(round(v, 12))
        v += step
    return ticks


def emit_plots(
    runs: list[tuple[str, str | Path]], out_path, metric: str = "success"
) -> Path:
    """Render one SVG chart of `metric` for labeled aggregate CSVs."""
    if metric not in _METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(_METRICS)}")
    mean_col, std_col, ylabel = _METRICS[metric]
    series = []
    for label, path in runs:
        try:
            data = read_aggregate(path)
        except (OSError, ValueError) as exc:
            raise ValueError(f"cannot plot {path}: {exc}") from None
        series.append((label, data))

    xs_all = [x for _, d in series for x in d["step"]]
    ys_all = []
    for _, d in series:
        ys_all.extend(d[mean_col])
        if std_col:
            ys_all.extend(d[mean_col] + d[std_col])
            ys_all.extend(d[mean_col] - d[std_col])
    x_lo, x_hi = 0.0, max(xs_all) if xs_all else 1.0
    y_lo = min(0.0, min(ys_all)) if ys_all else 0.0
    y_hi = max(ys_all) if ys_all else 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def px(x: float) -> float:
        return _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def py(y: float) -> float:
        return _H - _MB - (y - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="monospace" font-size="11">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    for tx in _ticks(x_lo, x_hi):
        parts.append(
            f'<line x1="{_fmt(px(tx))}" y1="{_H - _MB}" x2="{_fmt(px(tx))}" '
            f'y2="{_H - _MB + 4}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_fmt(px(tx))}" y="{_H - _MB + 16}" text-anchor="middle">{_fmt(tx)}</text>'
        )
    for ty in _ticks(y_lo, y_hi):
        parts.append(
            f'<line x1="{_ML - 4}" y1="{_fmt(py(ty))}" x2="{_ML}" y2="{_fmt(py(ty))}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_ML - 8}" y="{_fmt(py(ty) + 4)}" text-anchor="end">{_fmt(ty)}</text>'
        )
    parts.append(
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" stroke="black"/>'
    )
    parts.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" stroke="black"/>')
    parts.append(
        f'<text x="{(_ML + _W - _MR) // 2}" y="{_H - 8}" text-anchor="middle">environment steps</text>'
    )
    parts.append(
        f'<text x="14" y="{(_MT + _H - _MB) // 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {(_MT + _H - _MB) // 2})">{ylabel}</text>'
    )

    for i, (label, data) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        xs = data["step"]
        ys = data[mean_col]
        if std_col:
            band_pts = [f"{_fmt(px(x))},{_fmt(py(y + s))}" for x, y, s in zip(xs, ys, data[std_col])]
            band_pts += [
                f"{_fmt(px(x))},{_fmt(py(y - s))}"
                for x, y, s in zip(xs[::-1], ys[::-1], data[std_col][::-1])
            ]
            parts.append(
                f'<polygon points="{" ".join(band_pts)}" fill="{color}" opacity="0.15"/>'
            )
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = _MT + 14 * i
        parts.append(
            f'<line x1="{_W - _MR - 120}" y1="{ly}" x2="{_W - _MR - 96}" y2="{ly}" '
            f'stroke="{color}" stroke-width="3"/>'
        )
        parts.append(f'<text x="{_W - _MR - 90}" y="{ly + 4}">{label}</text>')

    parts.append("</svg>")
    out_path = Path(out_path)
    out_path.write_text("\n".join(parts) + "\n")
    return out_path
