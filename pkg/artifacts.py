"""
Reading and writing of command-line artifacts: pair files, JSON reports
and the sweep CSV.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Optional, Union

import pandas as pd
from pydantic import BaseModel
from pydantic import ValidationError as SchemaError

from errors import ValidationError
from helpers import format_float, matrix_from_json, to_jsonable
from models import MatrixPair, SweepResult
from schemas import PairFile

log = logging.getLogger(__name__)


def read_pair_file(path: Union[str, Path]) -> MatrixPair:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ValidationError(f"pair-file: {path} does not exist") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"pair-file: {path} is not valid JSON ({exc.msg})") from exc
    try:
        parsed = PairFile.model_validate(raw)
    except SchemaError as exc:
        first = exc.errors()[0]
        field = first["loc"][0] if first["loc"] else "pair-file"
        raise ValidationError(f"{field}: {first['msg']}") from exc
    return MatrixPair(matrix_from_json(parsed.a0, "a0"), matrix_from_json(parsed.a1, "a1"))


def dumps(payload: Union[BaseModel, dict]) -> str:
    """Deterministic JSON: declaration key order, repr floats, 'inf' for infinities"""
    data = payload.model_dump() if isinstance(payload, BaseModel) else payload
    return json.dumps(to_jsonable(data), indent=2, sort_keys=False)


def write_json(payload: Union[BaseModel, dict], path: Optional[Path] = None) -> None:
    text = dumps(payload) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text)
    log.info("wrote %s", path)


def scan_frame(result: SweepResult) -> pd.DataFrame:
    """param1, param2, re/im of the four eigenvalues, xi, degenerate_flag"""
    rows = []
    for record in result.records:
        params = list(record.params) + [float("nan")] * (2 - len(record.params))
        row = {"param1": params[0], "param2": params[1]}
        for i, lam in enumerate(record.eigenvalues):
            row[f"re_lambda{i}"] = float(lam.real)
            row[f"im_lambda{i}"] = float(lam.imag)
        row["xi"] = record.xi
        row["degenerate_flag"] = int(record.degenerate)
        rows.append(row)
    return pd.DataFrame(rows)


def write_frame(frame: pd.DataFrame, path: Optional[Path] = None) -> None:
    text = frame.to_csv(index=False, float_format=format_float, lineterminator="\n")
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text)
    log.info("wrote %d rows to %s", len(frame), path)


def write_scan_csv(result: SweepResult, path: Optional[Path] = None) -> None:
    write_frame(scan_frame(result), path)
