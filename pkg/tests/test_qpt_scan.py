import numpy as np
import pytest
from numpy.testing import assert_allclose

from errors import ValidationError
from models import CrossingType, GridAxis, ModelTag, ScanGrid
from qpt_scan import analytic_spectrum, compare_spectra, detect_crossings, sweep, track_branches, validate_grid

# grids that step over the defective points g = 0, +-1 of model B
_B_GRID = np.linspace(-1.95, 1.95, 40)
# odd tenths keep u*g away from the coincidences at 0 and 2
_C_GRID = np.linspace(-1.9, 1.9, 20)


def _b_scan(steps=401):
    grid = ScanGrid(tag=ModelTag.B, axes=(GridAxis("g", -1.0, 1.0, steps),), fixed={"c": 1.0})
    return detect_crossings(sweep(grid))


@pytest.mark.parametrize("g", _B_GRID)
def test_model_b_closed_form_spectrum(g):
    result = compare_spectra(ModelTag.B, g=g, c=1.0)
    assert not result.flagged
    assert result.deviation < 1e-8


@pytest.mark.parametrize("u", _C_GRID)
def test_model_c_closed_form_spectrum(u):
    result = compare_spectra(ModelTag.C, u=u, g=1.0)
    assert not result.flagged
    assert_allclose(np.sum(result.analytic), 8.0, atol=1e-12)


def test_analytic_spectrum_values():
    assert_allclose(sorted(analytic_spectrum(ModelTag.B, g=0.5).real), [0.5, 1.5, 1.5, 4.5])
    with pytest.raises(ValidationError, match="closed-form"):
        analytic_spectrum(ModelTag.A, g=0.5, theta=1.0)


def test_validate_grid():
    with pytest.raises(ValidationError, match="theta"):
        validate_grid(ScanGrid(tag=ModelTag.B, axes=(GridAxis("theta", 0, 1, 5),), fixed={"g": 0.5}))
    with pytest.raises(ValidationError, match="c"):
        validate_grid(ScanGrid(tag=ModelTag.B, axes=(GridAxis("g", 0, 1, 5),)))
    with pytest.raises(ValidationError, match="steps"):
        GridAxis("g", 0, 1, 1)
    with pytest.raises(ValidationError, match="distinct"):
        ScanGrid(tag=ModelTag.C, axes=(GridAxis("g", 0, 1, 3), GridAxis("g", 0, 1, 3)))


def test_sweep_is_row_major(monkeypatch):
    monkeypatch.setenv("MPS2_THREADS", "2")
    axes = (GridAxis("u", -1.0, 1.0, 3), GridAxis("g", 0.5, 1.5, 4))
    result = sweep(ScanGrid(tag=ModelTag.C, axes=axes))
    assert len(result.records) == 12
    assert result.records[5].params == (0.0, pytest.approx(5 / 6))
    record = result.records[1]
    assert record.eigenvalues.shape == (4,)
    assert record.ratio >= 1.0


def test_sweep_matches_single_thread(monkeypatch):
    grid = ScanGrid(tag=ModelTag.B, axes=(GridAxis("g", -0.9, 0.9, 7),), fixed={"c": 1.0})
    monkeypatch.setenv("MPS2_THREADS", "1")
    single = sweep(grid)
    monkeypatch.setenv("MPS2_THREADS", "4")
    pooled = sweep(grid)
    for a, b in zip(single.records, pooled.records):
        assert a.params == b.params
        assert_allclose(a.eigenvalues, b.eigenvalues)


def test_track_branches_follows_crossing_lines():
    x = np.linspace(0, 1, 11)
    rows = np.sort(np.column_stack([x, 1 - x]), axis=1)[:, ::-1].astype(complex)
    tracked = track_branches(rows)
    assert_allclose(tracked[:, 0].real, 1 - x, atol=1e-12)


def test_model_b_has_one_crossing_at_zero():
    report = _b_scan()
    crossings = report.of_kind(CrossingType.MAX_CROSSING)
    assert len(crossings) == 1
    assert abs(crossings[0].refined) < 1e-5
    lo, hi = crossings[0].bracket
    assert lo <= crossings[0].refined <= hi


def test_model_b_kinks_only_at_the_edges():
    kinks = _b_scan().of_kind(CrossingType.SECOND_KINK)
    for kink in kinks:
        assert abs(abs(kink.location) - 1.0) < 0.01
    assert any(abs(kink.location + 1.0) < 0.01 for kink in kinks)
    assert any(abs(kink.location - 1.0) < 0.01 for kink in kinks)


def test_model_c_crossings_sit_on_the_axes():
    axes = (GridAxis("u", -2.0, 2.0, 20), GridAxis("g", -2.0, 2.0, 20))
    report = detect_crossings(sweep(ScanGrid(tag=ModelTag.C, axes=axes)))
    step = 4.0 / 19
    maxima = report.of_kind(CrossingType.MAX_CROSSING)
    assert maxima
    for crossing in maxima:
        coords = dict(crossing.fixed)
        coords[crossing.axis] = crossing.location
        assert min(abs(coords["u"]), abs(coords["g"])) <= step * 1.0001


def test_model_a_has_no_crossing_along_theta():
    axis = GridAxis("theta", -np.pi + 0.01, np.pi - 0.01, 200)
    report = detect_crossings(sweep(ScanGrid(tag=ModelTag.A, axes=(axis,), fixed={"g": 0.5})))
    assert report.of_kind(CrossingType.MAX_CROSSING) == ()


def test_crossing_on_the_grid_end_is_kept_when_the_gap_closes():
    # c = 0 gives E = 2 I at g = 0
    grid = ScanGrid(tag=ModelTag.B, axes=(GridAxis("g", 0.0, 0.5, 51),), fixed={"c": 0.0})
    crossings = detect_crossings(sweep(grid)).of_kind(CrossingType.MAX_CROSSING)
    assert len(crossings) == 1
    assert crossings[0].location == 0.0
    assert abs(crossings[0].refined) < 1e-5


@pytest.mark.parametrize("u, g", [(0.0, 1.3), (-2.0, 0.0), (1.1, 0.0), (0.0, 0.0), (0.0, -2.0)])
def test_model_c_defective_points_match_closed_form(u, g):
    result = compare_spectra(ModelTag.C, u=u, g=g)
    assert not result.flagged
    assert result.deviation < 8e-9


@pytest.mark.parametrize("g", [-1.0, 0.0, 1.0])
def test_model_b_defective_points_match_closed_form(g):
    result = compare_spectra(ModelTag.B, g=g, c=1.0)
    assert not result.flagged
