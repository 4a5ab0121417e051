"""Fixed number formatting so repeated runs produce byte-identical files."""
from __future__ import annotations

import math

SIG_DIGITS = 9


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    return f"{x:.{SIG_DIGITS}g}"


def rounded(obj):
    """Recursively round floats to ``SIG_DIGITS`` significant digits for JSON output."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return fmt(obj)
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if hasattr(obj, "tolist"):
        return rounded(obj.tolist())
    if hasattr(obj, "item"):
        return rounded(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")
