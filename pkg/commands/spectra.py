import pandas as pd

from artifacts import write_frame, write_json, write_scan_csv
from commands import CommandRouter, model_params, resolve_pair
from errors import ValidationError
from helpers import complex_pair, parse_grid_spec, parse_operator
from models import CrossingReport, EvaluationMode, ModelTag, ScanGrid
from mps_core import correlation_length, expectation, transfer_matrix, two_point
from qpt_scan import compare_spectra, detect_crossings, sweep
from schemas import (
    CorrelationRow,
    CorrelationTable,
    CrossingReportSchema,
    CrossingSchema,
    RunConfig,
    SpectrumComparisonSchema,
    SpectrumSchema,
)

router = CommandRouter()


def crossing_schema(report: CrossingReport) -> CrossingReportSchema:
    return CrossingReportSchema(
        tag=report.tag.value,
        crossings=[
            CrossingSchema(
                kind=c.kind.value,
                axis=c.axis,
                location=c.location,
                bracket=c.bracket,
                refined=c.refined,
                fixed=dict(c.fixed),
            )
            for c in report.crossings
        ],
    )


@router.command("spectrum", help="Transfer-matrix eigenvalues and correlation length")
def spectrum(config: RunConfig) -> None:
    pair, tag = resolve_pair(config)
    tm = transfer_matrix(pair)
    lam = tm.spectrum.eigenvalues
    m1 = abs(lam[1])
    comparison = None
    if tag in (ModelTag.B, ModelTag.C):
        result = compare_spectra(tag, **model_params(config))
        comparison = SpectrumComparisonSchema(
            analytic=[complex_pair(z) for z in result.analytic],
            numeric=[complex_pair(z) for z in result.numeric],
            deviation=result.deviation,
            flagged=result.flagged,
        )
    write_json(
        SpectrumSchema(
            eigenvalues=[complex_pair(z) for z in lam],
            ratio=abs(lam[0]) / m1 if m1 > 0 else "inf",
            xi=correlation_length(pair),
            degeneracy_of_max=tm.degeneracy_of_max,
            is_defective=tm.spectrum.is_defective,
            comparison=comparison,
        ),
        config.output,
    )


@router.command("scan", help="Sweep a parameter grid and report crossings", arguments=("grid", "report"))
def scan(config: RunConfig) -> None:
    if config.model not in ("A", "B", "C"):
        raise ValidationError("model: scans run over the A, B and C families")
    axes = tuple(parse_grid_spec(spec) for spec in config.grids)
    if not axes:
        raise ValidationError("param: at least one name:min:max:steps grid is required")
    fixed = {k: v for k, v in model_params(config).items() if k not in {a.name for a in axes}}
    result = sweep(ScanGrid(tag=ModelTag(config.model), axes=axes, fixed=fixed))
    write_scan_csv(result, config.output)
    write_json(crossing_schema(detect_crossings(result, kink_factor=config.kink_factor)), config.report)


@router.command("correlate", help="One- and two-point functions against separation", arguments=("correlate",))
def correlate(config: RunConfig) -> None:
    pair, _ = resolve_pair(config)
    o = parse_operator(config.operator)
    mode = EvaluationMode(config.mode)
    n = config.sites[0] if config.sites else None
    if mode is EvaluationMode.FINITE and n is None:
        raise ValidationError("n: finite mode needs a chain length")

    one_mode = EvaluationMode.FINITE if mode is EvaluationMode.FINITE else EvaluationMode.THERMODYNAMIC
    one = expectation(pair, o, one_mode, n=n, defective_fallback=True)
    rows = []
    for r in range(2, config.r_max + 1):
        value = two_point(pair, o, r, mode, n=n, defective_fallback=mode is not EvaluationMode.ASYMPTOTIC)
        connected = value if mode is EvaluationMode.ASYMPTOTIC else value - one * one
        rows.append(CorrelationRow(r=r, two_point=complex_pair(value), connected=complex_pair(connected)))

    if config.format == "csv":
        frame = pd.DataFrame([
            {
                "r": row.r,
                "re_two_point": row.two_point[0],
                "im_two_point": row.two_point[1],
                "re_connected": row.connected[0],
                "im_connected": row.connected[1],
            }
            for row in rows
        ])
        write_frame(frame, config.output)
        return

    xi = correlation_length(pair, o) if not transfer_matrix(pair).spectrum.is_defective else correlation_length(pair)
    write_json(
        CorrelationTable(operator=o.name, mode=mode.value, expectation=complex_pair(one), xi=xi, rows=rows),
        config.output,
    )
