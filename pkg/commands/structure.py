import numpy as np

from artifacts import write_json
from classify import canonicalize, equivalence_witness
from commands import CommandRouter, resolve_other, resolve_pair
from config import DIAG_TOL, NULL_TOL
from helpers import complex_pair, matrix_to_json
from models import CanonicalForm
from schemas import CanonicalFormSchema, EquivalenceSchema, PairFile, RunConfig, WitnessReport, WitnessSchema
from symmetry import invariant_check, parity_witnesses, spin_flip_witnesses, verify_witness

router = CommandRouter()


def canonical_schema(form: CanonicalForm) -> CanonicalFormSchema:
    return CanonicalFormSchema(
        tag=form.tag.value,
        params=form.params,
        gauge_u=None if form.gauge_u is None else matrix_to_json(form.gauge_u),
        gauge_mu=None if form.gauge_mu is None else complex_pair(form.gauge_mu),
        swapped=form.swapped,
        notes=list(form.notes),
        residual=form.residual,
    )


@router.command("build", help="Emit the matrices of a model as a pair file")
def build(config: RunConfig) -> None:
    pair, _ = resolve_pair(config)
    write_json(PairFile(a0=matrix_to_json(pair.a0), a1=matrix_to_json(pair.a1)), config.output)


@router.command("classify", help="Reduce a pair to its canonical family", arguments=("tolerance",))
def classify(config: RunConfig) -> None:
    pair, _ = resolve_pair(config)
    form = canonicalize(pair, tol=config.diag_tol or DIAG_TOL)
    write_json(canonical_schema(form), config.output)


@router.command("witness", help="Spin-flip and parity witnesses", arguments=("tolerance",))
def witness(config: RunConfig) -> None:
    pair, _ = resolve_pair(config)
    tol = config.null_tol or NULL_TOL
    report = invariant_check(pair)
    flips = [
        WitnessSchema(kind="spin-flip", matrix=matrix_to_json(w.x), sign=w.epsilon, residual=verify_witness(pair, w))
        for w in spin_flip_witnesses(pair, tol)
    ]
    parities = [
        WitnessSchema(kind="parity", matrix=matrix_to_json(w.omega), sign=w.sigma, residual=verify_witness(pair, w))
        for w in parity_witnesses(pair, tol)
    ]
    write_json(
        WitnessReport(
            trace_sign=report.trace_sign,
            det_ok=report.det_ok,
            spin_flip=flips or "none",
            parity=parities or "none",
        ),
        config.output,
    )


@router.command("equivalence", help="Gauge equivalence S A_i S^-1 = mu A'_i", arguments=("other", "tolerance"))
def equivalence(config: RunConfig) -> None:
    pair = resolve_pair(config)[0]
    other = resolve_other(config.other)
    found = equivalence_witness(pair, other, tol=config.null_tol or NULL_TOL)
    if found is None:
        write_json(EquivalenceSchema(), config.output)
        return
    s, mu = found
    s_inv = np.linalg.inv(s)
    residual = max(float(np.linalg.norm(s @ a @ s_inv - mu * b)) for a, b in zip(pair.matrices, other.matrices))
    write_json(EquivalenceSchema(s=matrix_to_json(s), mu=complex_pair(mu), residual=residual), config.output)
