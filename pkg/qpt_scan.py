"""
Parameter sweeps of the canonical families and detection of MPS phase
transition candidates: level crossings of the leading transfer-matrix
eigenvalue and kinks in the modulus of the second one.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.cluster.hierarchy import fclusterdata
from scipy.optimize import linear_sum_assignment, minimize_scalar

from classify import PARAM_NAMES, build_model
from config import KINK_FACTOR, worker_count
from errors import ValidationError
from models import (
    Crossing,
    CrossingReport,
    CrossingType,
    EigenDecomposition,
    GridAxis,
    MatrixPair,
    ModelTag,
    ScanGrid,
    SpectralRecord,
    SpectrumComparison,
    SweepResult,
    frozen_array,
)
from mps_core import correlation_length, transfer_matrix

log = logging.getLogger(__name__)

_DISCREPANCY_TOL = 1e-9
_REFINE_XATOL = 1e-7
_GAP_FLOOR = 1e-9
_EDGE_XTOL = 10 * _REFINE_XATOL
_ILL_CONDITIONED = 1e4
_CLUSTER_RADIUS = 1e-3


def model_pair(tag: ModelTag, params: Dict[str, float]) -> MatrixPair:
    return build_model(tag, **params)


def validate_grid(grid: ScanGrid) -> None:
    names = PARAM_NAMES.get(grid.tag)
    if names is None:
        raise ValidationError(f"tag: {grid.tag.value} has no parameters to scan")
    for axis in grid.axes:
        if axis.name not in names:
            raise ValidationError(f"{axis.name}: not a parameter of model {grid.tag.value}")
    missing = [n for n in names if n != "epsilon" and n not in grid.fixed and n not in {a.name for a in grid.axes}]
    if missing:
        raise ValidationError(f"{', '.join(missing)}: parameter neither scanned nor fixed")


def spectral_record(tag: ModelTag, fixed: Dict[str, float], names: Sequence[str], point: Sequence[float]) -> SpectralRecord:
    params = dict(fixed)
    params.update(zip(names, point))
    pair = model_pair(tag, params)
    tm = transfer_matrix(pair)
    lam = tm.spectrum.eigenvalues
    m0, m1 = abs(lam[0]), abs(lam[1])
    return SpectralRecord(
        params=tuple(float(p) for p in point),
        eigenvalues=frozen_array(lam),
        ratio=float(m0 / m1) if m1 > 0 else float("inf"),
        xi=correlation_length(pair),
        degenerate=tm.degeneracy_of_max > 1,
    )


def sweep(grid: ScanGrid) -> SweepResult:
    """Spectra at every grid point, row-major over the axes; points run concurrently"""
    validate_grid(grid)
    names = [a.name for a in grid.axes]
    points = list(product(*(a.values() for a in grid.axes)))
    workers = worker_count()
    log.info("sweeping %s over %d points with %d workers", grid.tag.value, len(points), workers)
    task = partial(spectral_record, grid.tag, grid.fixed, names)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        records = tuple(pool.map(task, points))
    return SweepResult(grid=grid, records=records)


def analytic_spectrum(tag: ModelTag, **params) -> np.ndarray:
    """Closed-form transfer-matrix eigenvalues of models B and C"""
    eps = params.get("epsilon", 1)
    if tag is ModelTag.B:
        g = float(params["g"])
        return np.array([
            (1 + g) ** 2 + (eps + g) ** 2,
            (1 - g) ** 2 + (eps - g) ** 2,
            2 * (1 - g**2),
            2 * (1 - g**2),
        ], dtype=complex)
    if tag is ModelTag.C:
        p = eps * float(params["u"]) * float(params["g"])
        root = np.sqrt(complex(16 * p + p**2))
        return np.array([2, 2 - p, 2 + p / 2 + root / 2, 2 + p / 2 - root / 2], dtype=complex)
    raise ValidationError(f"tag: no closed-form spectrum for model {tag.value}")


def _resolved_eigenvalues(spectrum: EigenDecomposition) -> np.ndarray:
    """Eigenvalues with each cluster of ill-conditioned ones replaced by its mean.

    Near a Jordan block the computed eigenvalues scatter by eps^(1/m) while
    their mean stays accurate to working precision.
    """
    w = np.array(spectrum.eigenvalues, dtype=complex)
    left, right = np.asarray(spectrum.left_vectors), np.asarray(spectrum.right_vectors)
    overlap = np.abs(np.einsum("ij,ij->j", left.conj(), right))
    kappa = np.linalg.norm(left, axis=0) * np.linalg.norm(right, axis=0) / np.maximum(overlap, 1e-300)
    shaky = np.flatnonzero(kappa > _ILL_CONDITIONED)
    if shaky.size < 2:
        return w
    radius = _CLUSTER_RADIUS * max(1.0, float(np.abs(w).max()))
    points = np.column_stack([w[shaky].real, w[shaky].imag])
    labels = fclusterdata(points, t=radius, criterion="distance", method="single")
    for label in np.unique(labels):
        members = shaky[labels == label]
        w[members] = w[members].mean()
    return w


def compare_spectra(tag: ModelTag, **params) -> SpectrumComparison:
    analytic = analytic_spectrum(tag, **params)
    numeric = _resolved_eigenvalues(transfer_matrix(model_pair(tag, params)).spectrum)
    cost = np.abs(analytic[:, None] - numeric[None, :])
    rows, cols = linear_sum_assignment(cost)
    matched = numeric[cols[np.argsort(rows)]]
    deviation = float(cost[rows, cols].max())
    scale = max(1.0, float(np.abs(numeric).max()))
    flagged = deviation > _DISCREPANCY_TOL * scale
    if flagged:
        log.warning(
            "closed-form spectrum of model %s deviates by %.3e at %s: analytic %s, numeric %s",
            tag.value, deviation, params, np.round(analytic, 10), np.round(numeric, 10),
        )
    return SpectrumComparison(
        tag=tag,
        params=dict(params),
        analytic=frozen_array(analytic),
        numeric=frozen_array(matched),
        deviation=deviation,
        flagged=flagged,
    )


# Crossing detection
def track_branches(spectra: np.ndarray) -> np.ndarray:
    """Reorder each row so column b follows one continuous branch.

    Each point is matched to a linear extrapolation of the previous two,
    which carries branches straight through touching points.
    """
    tracked = np.array(spectra, dtype=complex)
    for i in range(1, len(tracked)):
        prev = tracked[i - 1]
        predicted = 2 * prev - tracked[i - 2] if i >= 2 else prev
        cost = np.abs(predicted[:, None] - tracked[i][None, :])
        _, cols = linear_sum_assignment(cost)
        tracked[i] = tracked[i][cols]
    return tracked


def _relative_gap(lam: np.ndarray) -> float:
    mods = np.sort(np.abs(lam))[::-1]
    return float((mods[0] - mods[1]) / mods[0]) if mods[0] > 0 else 0.0


class _Trace:
    """One 1-D line of a sweep with a ghost evaluation one step beyond each end"""

    def __init__(self, tag: ModelTag, axis: GridAxis, fixed: Dict[str, float], spectra: np.ndarray):
        self.tag = tag
        self.axis = axis
        self.fixed = fixed
        self.xs = axis.values()
        step = self.xs[1] - self.xs[0]
        ghosts = [self.spectrum(self.xs[0] - step), self.spectrum(self.xs[-1] + step)]
        self.extended = np.vstack([ghosts[0], spectra, ghosts[1]])

    def spectrum(self, x: float) -> np.ndarray:
        params = dict(self.fixed)
        params[self.axis.name] = float(x)
        return transfer_matrix(model_pair(self.tag, params)).spectrum.eigenvalues

    def gap(self, x: float) -> float:
        return _relative_gap(self.spectrum(x))

    def label(self) -> Tuple[Tuple[str, float], ...]:
        return tuple((k, float(v)) for k, v in self.fixed.items() if k != "epsilon")


def _max_crossings(trace: _Trace) -> List[Crossing]:
    xs = trace.xs
    gaps = np.array([_relative_gap(lam) for lam in trace.extended])
    tracked = track_branches(trace.extended)
    leader = np.argmax(np.abs(tracked), axis=1)
    found = []
    # extended index j corresponds to grid index j - 1
    for j in range(1, len(xs) + 1):
        left, mid, right = gaps[j - 1], gaps[j], gaps[j + 1]
        if not (mid < left and mid <= right):
            continue
        if min(left, right) <= _GAP_FLOOR or leader[j - 1] == leader[j + 1]:
            continue
        lo = xs[j - 2] if j >= 2 else xs[0]
        hi = xs[j] if j < len(xs) else xs[-1]
        result = minimize_scalar(trace.gap, bounds=(lo, hi), method="bounded", options={"xatol": _REFINE_XATOL})
        refined_gap = min(float(result.fun), mid)
        refined = float(result.x) if result.fun <= mid else float(xs[j - 1])
        if refined_gap > 0.5 * min(left, right):
            log.debug("gap minimum near %s=%.6g does not close (%.3e)", trace.axis.name, xs[j - 1], refined_gap)
            continue
        # at the ends only the ghost side brackets the minimum; keep it when the gap closes on the grid
        at_end = j in (1, len(xs)) and abs(refined - xs[j - 1]) <= _EDGE_XTOL
        if at_end and mid > _GAP_FLOOR:
            log.debug("gap minimum beyond the grid end %s=%.6g", trace.axis.name, xs[j - 1])
            continue
        found.append(Crossing(
            kind=CrossingType.MAX_CROSSING,
            axis=trace.axis.name,
            location=float(xs[j - 1]),
            bracket=(float(lo), float(hi)),
            refined=refined,
            fixed=trace.label(),
        ))
    return found


def _second_kinks(trace: _Trace, factor: float, near: Sequence[float]) -> List[Crossing]:
    xs = trace.xs
    step = xs[1] - xs[0]
    second = np.sort(np.abs(trace.extended), axis=1)[:, -2]
    d2 = np.abs(second[:-2] - 2 * second[1:-1] + second[2:])  # one value per grid point
    threshold = max(factor * float(np.median(d2)), 1e-9 * float(second.max()))
    flagged = np.flatnonzero(d2 > threshold)

    found = []
    runs = np.split(flagged, np.flatnonzero(np.diff(flagged) > 1) + 1) if flagged.size else []
    for run in runs:
        i = int(run[np.argmax(d2[run])])
        if any(abs(xs[i] - x) <= step * 1.000001 for x in near):
            continue
        found.append(Crossing(
            kind=CrossingType.SECOND_KINK,
            axis=trace.axis.name,
            location=float(xs[i]),
            bracket=(float(xs[max(i - 1, 0)]), float(xs[min(i + 1, len(xs) - 1)])),
            fixed=trace.label(),
        ))
    return found


def _lines(result: SweepResult):
    """1-D traces of a sweep: the single axis, or every row and column of a 2-D grid"""
    grid = result.grid
    spectra = np.array([r.eigenvalues for r in result.records])
    if len(grid.axes) == 1:
        yield grid.axes[0], dict(grid.fixed), spectra
        return
    first, second = grid.axes
    table = spectra.reshape(first.steps, second.steps, -1)
    for i, value in enumerate(first.values()):
        yield second, {**grid.fixed, first.name: float(value)}, table[i]
    for j, value in enumerate(second.values()):
        yield first, {**grid.fixed, second.name: float(value)}, table[:, j]


def detect_crossings(result: SweepResult, kink_factor: Optional[float] = None) -> CrossingReport:
    """Max-crossings refined on the relative gap, and kinks of |lambda_1| away from them"""
    factor = KINK_FACTOR if kink_factor is None else kink_factor
    crossings: List[Crossing] = []
    for axis, fixed, spectra in _lines(result):
        trace = _Trace(result.grid.tag, axis, fixed, spectra)
        maxima = _max_crossings(trace)
        kinks = _second_kinks(trace, factor, [c.location for c in maxima])
        crossings.extend(maxima)
        crossings.extend(kinks)
    log.info(
        "model %s: %d max-crossings, %d second-kinks",
        result.grid.tag.value,
        sum(c.kind is CrossingType.MAX_CROSSING for c in crossings),
        sum(c.kind is CrossingType.SECOND_KINK for c in crossings),
    )
    return CrossingReport(tag=result.grid.tag, crossings=tuple(crossings))
