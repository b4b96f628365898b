"""Entanglement and metrological-usefulness criteria for two bosonic modes
and for collections of spins.

CV usefulness flags compare against the class of two-mode states with a
nonnegative Glauber-Sudarshan P function (mixtures of products of coherent
states).  That class is a strict subset of the separable states, so the
flags never claim "more useful than all separable states".
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundReport
from .core import (
    DimensionMismatchError,
    FockAlgebra,
    HermitianOperator,
    State,
    make_spin_algebra,
    tensor,
    variance,
)
from .metrology import qfi
from .roofs import OptimizerConfig, roof_sum_I

USEFULNESS_TOL = 1e-9
QFI_DEGENERATE = 1e-12


def _two_mode_quadratures(fock: FockAlgebra):
    eye = HermitianOperator(np.eye(fock.cutoff))
    x1 = tensor(fock.x, eye)
    x2 = tensor(eye, fock.x)
    p1 = tensor(fock.p, eye)
    p2 = tensor(eye, fock.p)
    return x1, x2, p1, p2


@dataclass(frozen=True)
class TwoModeReport:
    """Pair-variance entanglement criterion and its Fisher-information side."""

    duan_lhs: float
    duan_rhs: float
    qfi_x_minus: float
    qfi_p_plus: float
    fisher_pair_slack: float
    fisher_pair_status: str
    entangled: bool
    useful_flags: dict = field(default_factory=dict)

    @property
    def more_useful_than_p_nonnegative(self) -> bool:
        return any(self.useful_flags.values())


def duan_report(state: State, fock: FockAlgebra) -> TwoModeReport:
    """Var(x1+x2) + Var(p1-p2) against both its entanglement and QFI bounds.

    Violating the separability threshold 2 witnesses entanglement; the
    Fisher-information relation
    lhs >= 4/F_Q[rho, p1+p2] + 4/F_Q[rho, x1-x2] holds for every state.
    A vanishing Fisher term would make that bound degenerate; it is treated
    as zero contribution only when the matching variance also vanishes,
    otherwise the check is reported as numerically indeterminate.
    """
    if state.dim != fock.cutoff**2:
        raise DimensionMismatchError(
            f"state dim {state.dim} is not cutoff^2 = {fock.cutoff ** 2}")
    x1, x2, p1, p2 = _two_mode_quadratures(fock)
    var_x_plus = variance(state, x1 + x2)
    var_p_minus = variance(state, p1 - p2)
    lhs = var_x_plus + var_p_minus
    f_p_plus = qfi(state, p1 + p2)
    f_x_minus = qfi(state, x1 - x2)

    status = "ok"
    fisher_pair_rhs = 0.0
    for f, var in ((f_p_plus, var_x_plus), (f_x_minus, var_p_minus)):
        if f < QFI_DEGENERATE:
            if var > QFI_DEGENERATE:
                status = "indeterminate"
            # matching variance is zero too: the term contributes nothing
        else:
            fisher_pair_rhs += 4.0 / f
    fisher_pair_gap = lhs - fisher_pair_rhs if status == "ok" else np.nan

    flags = coherent_mixture_usefulness(state, fock)
    return TwoModeReport(
        duan_lhs=lhs,
        duan_rhs=2.0,
        qfi_x_minus=f_x_minus,
        qfi_p_plus=f_p_plus,
        fisher_pair_slack=float(fisher_pair_gap),
        fisher_pair_status=status,
        entangled=lhs < 2.0 - USEFULNESS_TOL,
        useful_flags=flags,
    )


def coherent_mixture_usefulness(state: State, fock: FockAlgebra) -> dict:
    """Flag quadrature combinations whose QFI exceeds the P-nonnegative cap of 4."""
    x1, x2, p1, p2 = _two_mode_quadratures(fock)
    combos = {
        "x1+x2": x1 + x2,
        "x1-x2": x1 - x2,
        "p1+p2": p1 + p2,
        "p1-p2": p1 - p2,
    }
    return {name: bool(qfi(state, op) > 4.0 + USEFULNESS_TOL)
            for name, op in combos.items()}


@dataclass(frozen=True)
class TwoSpinReport:
    """Collective-variance criterion and Fisher usefulness for two spins."""

    j1: float
    j2: float
    collective_var_sum: float
    separable_floor: float
    fq_sum_minus: float
    spin_coherent_fisher_cap: float
    three_axis_lhs: float
    three_axis_rhs: float
    entangled: bool
    more_useful_than_spin_coherent: bool


def two_spin_report(state: State, j1, j2,
                    sign_var: int = +1, sign_fq: int = -1) -> TwoSpinReport:
    """Evaluate the two-spin variance criterion and its usefulness companion.

    ``sign_var`` and ``sign_fq`` pick the relative sign inside the collective
    variance and Fisher operators; the default pairs summed variances with
    differential Fisher terms, which is the combination a singlet maximizes.
    """
    spin1 = make_spin_algebra(j1)
    spin2 = make_spin_algebra(j2)
    dim = spin1.dim * spin2.dim
    if state.dim != dim:
        raise DimensionMismatchError(f"state dim {state.dim}, expected {dim}")
    if sign_var not in (-1, 1) or sign_fq not in (-1, 1):
        raise ValueError("signs must be +1 or -1")
    eye1 = HermitianOperator(np.eye(spin1.dim))
    eye2 = HermitianOperator(np.eye(spin2.dim))

    var_sum = 0.0
    fq_sum = 0.0
    for op1, op2 in zip(spin1.as_tuple(), spin2.as_tuple()):
        a = tensor(op1, eye2)
        b = tensor(eye1, op2)
        var_sum += variance(state, a + sign_var * b)
        fq_sum += qfi(state, a + sign_fq * b)

    j_total = spin1.j + spin2.j
    return TwoSpinReport(
        j1=spin1.j, j2=spin2.j,
        collective_var_sum=var_sum,
        separable_floor=j_total,
        fq_sum_minus=fq_sum,
        spin_coherent_fisher_cap=4.0 * j_total,
        three_axis_lhs=8.0 * var_sum + fq_sum,
        three_axis_rhs=12.0 * j_total,
        entangled=var_sum < j_total - USEFULNESS_TOL,
        more_useful_than_spin_coherent=fq_sum > 4.0 * j_total + USEFULNESS_TOL,
    )


def collective_spin_ops(j, n_parties: int) -> tuple[HermitianOperator, ...]:
    """Collective J_x, J_y, J_z for n spin-j parties, built as tensor sums."""
    spin = make_spin_algebra(j)
    if n_parties < 1:
        raise ValueError("need at least one party")
    eye = np.eye(spin.dim)
    out = []
    for op in spin.as_tuple():
        total = np.zeros((spin.dim**n_parties,) * 2, dtype=complex)
        for site in range(n_parties):
            factors = [eye] * n_parties
            factors[site] = op.mat
            term = factors[0]
            for f in factors[1:]:
                term = np.kron(term, f)
            total += term
        out.append(HermitianOperator(total))
    return tuple(out)


def vxyz_criterion(state: State, j, n_parties: int,
                   cfg: OptimizerConfig | None = None) -> BoundReport:
    """Separability test via the convex roof of the collective variance sum.

    Separable states obey roof >= N j.  The optimizer value is an upper
    bound on the true roof (any decomposition is a witness), so a reported
    violation is conservative: the state is certainly entangled.  A
    non-violating report is inconclusive rather than a separability proof.
    """
    ops = collective_spin_ops(j, n_parties)
    if state.dim != ops[0].dim:
        raise DimensionMismatchError(
            f"state dim {state.dim}, expected {ops[0].dim}")
    roof = roof_sum_I(state, ops, cfg=cfg)
    spin = make_spin_algebra(j)
    return BoundReport(
        name="collective_variance_roof",
        lhs=roof.value,
        rhs=float(n_parties) * spin.j,
        meta={"n_parties": n_parties, "j": spin.j,
              "converged": roof.converged,
              "witness_is_upper_bound": True},
    )
