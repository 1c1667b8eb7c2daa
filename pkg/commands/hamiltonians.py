import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from artifacts import write_json
from commands import CommandRouter, model_params, resolve_pair
from config import NULL_TOL
from ed_oracle import branch_states, export_state, ground_check, mps_to_dense, state_symmetry_check
from errors import NumericalError, ValidationError
from helpers import complex_pair, parse_weights
from models import MatrixPair, ModelTag, OrbitMode
from parent_ham import (
    assemble_chain,
    chain_density,
    compare_pauli,
    fit_parent_family,
    interaction_range,
    local_hamiltonian,
    null_space_basis,
    pauli_decomposition,
    printed_cirac,
    printed_h_a,
    printed_h_b,
    symmetry_orbits,
)
from schemas import ComparisonSchema, FamilyFitSchema, HamiltonianReport, RunConfig, VerifyEntry, VerifyReport
from symmetry import parity_witnesses, spin_flip_witnesses

log = logging.getLogger(__name__)

router = CommandRouter()


def printed_targets(config: RunConfig, tag: Optional[ModelTag]) -> List[Tuple[str, Dict[str, float]]]:
    """Closed-form chain Hamiltonians the constructed one is compared with"""
    params = model_params(config)
    if config.model == "cirac":
        return [("cirac", printed_cirac(params["q"]))]
    if tag is ModelTag.A:
        targets = [("H_A", printed_h_a(params["theta"]))]
        if abs(params["g"] - 1) < 1e-12:
            targets.append(("cirac", printed_cirac((1 + np.cos(params["theta"])) / 2)))
        return targets
    if tag is ModelTag.B:
        return [("H_B", printed_h_b(params["g"]))]
    return []


def _parent(pair: MatrixPair, config: RunConfig):
    tol = config.null_tol or NULL_TOL
    k = interaction_range(pair, k_max=config.k_max, tol=tol)
    if k is None:
        return None, None, None
    basis = null_space_basis(pair, k, tol)
    witnesses = spin_flip_witnesses(pair) + parity_witnesses(pair)
    orbits = symmetry_orbits(basis, witnesses, OrbitMode(config.orbit_mode))
    weights = parse_weights(config.weights) if config.weights else 1.0
    return k, orbits, local_hamiltonian(orbits, weights)


@router.command("hamiltonian", help="Interaction range, null basis and Pauli content of the parent Hamiltonian",
                arguments=("hamiltonian", "tolerance"))
def hamiltonian(config: RunConfig) -> None:
    pair, tag = resolve_pair(config)
    k, orbits, local = _parent(pair, config)
    if k is None:
        write_json(HamiltonianReport(interaction_range="none", null_dimension=0), config.output)
        return

    decomposition = pauli_decomposition(local)
    comparisons, fits = [], []
    for target, printed in printed_targets(config, tag):
        c = compare_pauli(decomposition, printed, target)
        comparisons.append(ComparisonSchema(
            target=c.target, scale=c.scale, shift=c.shift, residual=c.residual,
            flagged=c.flagged, constructed=c.constructed, printed=c.printed,
        ))
        f = fit_parent_family(orbits, printed, target)
        fits.append(FamilyFitSchema(
            target=f.target, residual=f.residual, shift=f.shift,
            eigenvalues=[float(e) for e in f.eigenvalues], definite=f.definite,
        ))

    write_json(
        HamiltonianReport(
            interaction_range=k,
            null_dimension=len(orbits.vectors),
            null_vectors=[[complex_pair(x) for x in v] for v in orbits.vectors],
            orbit_mode=orbits.mode.value,
            orbits=[list(o) for o in orbits.orbits],
            pauli=decomposition.terms,
            chain_density=chain_density(decomposition),
            comparisons=comparisons,
            family_fits=fits,
        ),
        config.output,
    )


def _export_path(config: RunConfig, n: int):
    path = config.export_state
    if len(config.sites) == 1:
        return path
    return path.with_name(f"{path.stem}_n{n}{path.suffix}")


@router.command("verify", help="Exact-diagonalization check of the MPS ground state",
                arguments=("sites", "hamiltonian", "tolerance"))
def verify(config: RunConfig) -> None:
    pair, _ = resolve_pair(config)
    if not config.sites:
        raise ValidationError("n: verify needs at least one chain length")
    k, _, local = _parent(pair, config)
    if k is None:
        raise NumericalError(f"no parent Hamiltonian with interaction range <= {config.k_max}")

    entries = []
    for n in config.sites:
        chain = assemble_chain(local, n)
        state = mps_to_dense(pair, n)
        branches = branch_states(pair, n)
        labels = ["mps"] + [f"branch{i + 1}" for i in range(len(branches))]
        report = ground_check(chain, [state] + branches)
        symmetry = state_symmetry_check(state)
        if config.export_state is not None:
            export_state(state, _export_path(config, n))
        log.info("n=%d lambda_min=%s ground dimension %s", n, report.lambda_min, report.ground_dimension)
        entries.append(VerifyEntry(
            n=n,
            full_diagonalization=report.full_diagonalization,
            lowest=[float(x) for x in report.lowest],
            lambda_min=report.lambda_min,
            norm_bound=report.norm_bound,
            ground_dimension=report.ground_dimension,
            states=labels,
            rayleigh=list(report.rayleigh),
            overlaps=list(report.overlaps),
            spin_flip_residual=symmetry.spin_flip_residual,
            reversal_residual=symmetry.reversal_residual,
        ))
    write_json(VerifyReport(interaction_range=k, entries=entries), config.output)
