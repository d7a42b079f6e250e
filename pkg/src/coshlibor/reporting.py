"""Byte-stable CSV and JSON writers."""

from __future__ import annotations

import io
import json
import math
from pathlib import Path

from .volsurface import NO_SOLUTION, NOT_AVAILABLE, OK, ZERO_TIME_VALUE, VolSurfaceGrid

SIG_DIGITS = 12
FLAG_TOKENS = {ZERO_TIME_VALUE: "#ZTV", NO_SOLUTION: "#NOSOL", NOT_AVAILABLE: "#NA"}


def format_sig(value: float, digits: int = SIG_DIGITS) -> str:
    """Fixed-point text with ``digits`` significant digits; zero prints as ``0.000000000000``."""
    if math.isnan(value):
        return "nan"
    if value == 0.0:
        return "0." + "0" * digits
    exponent = math.floor(math.log10(abs(value)))
    decimals = max(digits - 1 - exponent, 0)
    text = f"{value:.{decimals}f}"
    # rounding can carry into a new leading digit (9.99.. -> 10.0..)
    if len(text.lstrip("-").replace(".", "").lstrip("0")) > digits and decimals > 0:
        text = f"{value:.{decimals - 1}f}"
    return text


def surface_csv(grid: VolSurfaceGrid) -> str:
    """CSV text: header ``expiry,<columns>``, one row per maturity, LF line ends."""
    buf = io.StringIO()
    buf.write(",".join(["expiry"] + [f"{c:.12g}" for c in grid.columns]) + "\n")
    for i, m in enumerate(grid.maturities):
        cells = [f"{m:.12g}"]
        for j in range(len(grid.columns)):
            flag = grid.flags[i][j]
            cell = format_sig(float(grid.vols[i, j]))
            cells.append(cell if flag == OK else cell + FLAG_TOKENS[flag])
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def write_surface_csv(grid: VolSurfaceGrid, destination: str | Path) -> None:
    Path(destination).write_bytes(surface_csv(grid).encode("ascii"))


def _clean(obj):
    # JSON has no NaN/inf; write them as strings
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def to_json(document) -> str:
    return json.dumps(_clean(document), indent=2, sort_keys=True) + "\n"
