import enum
import math
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from errors import ValidationError
from models import PAULI, GridAxis, SiteOperator


def format_float(value: float) -> str:
    """Shortest round-trip representation (at most 17 significant digits)"""
    return repr(float(value))


def complex_pair(z) -> List[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_to_json(m) -> List[List[List[float]]]:
    return [[complex_pair(x) for x in row] for row in np.asarray(m)]


def matrix_from_json(value, name: str) -> np.ndarray:
    """Nested rows of numbers or [re, im] pairs -> complex ndarray"""
    try:
        rows = [[_entry(x) for x in row] for row in value]
        arr = np.array(rows, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: malformed matrix ({exc})") from exc
    return arr


def _entry(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError("complex entries are [re, im]")
        return complex(float(x[0]), float(x[1]))
    return complex(float(x))


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy/complex/inf values into plain JSON types"""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(float(obj.real)), to_jsonable(float(obj.imag))]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def parse_grid_spec(text: str) -> GridAxis:
    """'name:min:max:steps' -> GridAxis"""
    parts = text.split(":")
    if len(parts) != 4:
        raise ValidationError(f"param: expected name:min:max:steps, got '{text}'")
    name, lo, hi, steps = parts
    try:
        return GridAxis(name=name.strip(), min=float(lo), max=float(hi), steps=int(steps))
    except ValueError as exc:
        raise ValidationError(f"param: cannot parse '{text}' ({exc})") from exc


def parse_sites_list(text: str) -> List[int]:
    """'6,8,10' -> [6, 8, 10]"""
    try:
        sites = [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ValidationError(f"n: expected a comma-separated list of integers, got '{text}'") from exc
    if not sites:
        raise ValidationError("n: at least one chain length is required")
    return sites


def parse_assignments(text: str) -> Dict[str, float]:
    """'g=1,theta=0.5' -> {'g': 1.0, 'theta': 0.5}"""
    params: Dict[str, float] = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, value = item.partition("=")
        if not sep:
            raise ValidationError(f"params: expected name=value, got '{item}'")
        try:
            params[name.strip()] = float(value)
        except ValueError as exc:
            raise ValidationError(f"{name.strip()}: not a number '{value}'") from exc
    return params


def parse_model_spec(text: str) -> Tuple[str, Dict[str, float]]:
    """'cirac:q=0.5' or 'A:g=1,theta=1.57' -> (tag, params)"""
    tag, _, rest = text.partition(":")
    return tag.strip(), parse_assignments(rest)


def parse_operator(name: str) -> SiteOperator:
    key = name.strip().upper()
    if key not in PAULI:
        raise ValidationError(f"operator: expected one of {', '.join(PAULI)}, got '{name}'")
    return PAULI[key]


def parse_weights(text: str) -> Sequence[float]:
    try:
        return [float(w) for w in text.split(",") if w.strip()]
    except ValueError as exc:
        raise ValidationError(f"weights: cannot parse '{text}'") from exc
