"""Quantum Fisher information, symmetric logarithmic derivative, and
estimation-error diagnostics for unitary phase imprinting exp(-i B theta)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DensityMatrix,
    DimensionMismatchError,
    HermitianOperator,
    PureState,
    State,
    commutator_i,
    expectation,
    variance,
)

PAIR_SKIP = 1e-12  # eigenvalue pairs with lambda_k + lambda_l below this contribute zero


class VanishingSignalError(ValueError):
    """|<i[A,B]>| is numerically zero, so error propagation is undefined."""


class UnestimableParameterError(ValueError):
    """The Fisher information vanishes; the phase leaves no trace on the state."""


def _pair_weights(lam: np.ndarray) -> np.ndarray:
    """(lambda_k - lambda_l)^2 / (lambda_k + lambda_l) with the skip rule applied."""
    s = lam[:, None] + lam[None, :]
    d = lam[:, None] - lam[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(s < PAIR_SKIP, 0.0, d * d / np.where(s < PAIR_SKIP, 1.0, s))
    return w


def qfi(state: State, b: HermitianOperator) -> float:
    """Quantum Fisher information F_Q[rho, B].

    Computed from the spectral sum over eigenvalue pairs; for a pure state it
    reduces exactly to four times the variance of B.
    """
    if state.dim != b.dim:
        raise DimensionMismatchError(f"state dim {state.dim} != operator dim {b.dim}")
    if isinstance(state, PureState):
        return 4.0 * variance(state, b)
    lam = state.eigenvalues
    vecs = state.eigenvectors
    bmat = vecs.conj().T @ b.mat @ vecs
    w = _pair_weights(lam)
    return float(2.0 * np.sum(w * np.abs(bmat) ** 2))


@dataclass(frozen=True)
class SldResult:
    """Symmetric logarithmic derivative of exp(-i B theta) dynamics at theta = 0."""

    sld: HermitianOperator
    qfi: float
    mean_sld: float


def sld(state: State, b: HermitianOperator) -> SldResult:
    """Symmetric logarithmic derivative L with i[rho, B] = {rho, L}/2.

    L is assembled in the eigenbasis of rho with the same rank-deficient
    pair-skipping rule as the Fisher information; its mean vanishes and
    Tr(rho L^2) equals F_Q.
    """
    if state.dim != b.dim:
        raise DimensionMismatchError(f"state dim {state.dim} != operator dim {b.dim}")
    rho = state.density() if isinstance(state, PureState) else state
    lam = rho.eigenvalues
    vecs = rho.eigenvectors
    bmat = vecs.conj().T @ b.mat @ vecs
    s = lam[:, None] + lam[None, :]
    d = lam[:, None] - lam[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(s < PAIR_SKIP, 0.0, d / np.where(s < PAIR_SKIP, 1.0, s))
    l_eig = 2j * ratio * bmat
    l_mat = vecs @ l_eig @ vecs.conj().T
    ell = HermitianOperator(l_mat)

    lhs = 1j * (rho.mat @ b.mat - b.mat @ rho.mat)
    rhs = 0.5 * (rho.mat @ l_mat + l_mat @ rho.mat)
    residual = np.linalg.norm(lhs - rhs)
    scale = max(np.linalg.norm(lhs), 1.0)
    if residual > 1e-8 * scale:
        raise ArithmeticError(
            f"SLD defining equation violated: residual {residual:.3e} vs scale {scale:.3e}")

    f = float(np.real(np.trace(rho.mat @ l_mat @ l_mat)))
    mean = expectation(rho, ell)
    return SldResult(sld=ell, qfi=f, mean_sld=mean)


def state_density(state: State) -> DensityMatrix:
    """Promote a state-vector argument to its density matrix."""
    return state.density() if isinstance(state, PureState) else state


@dataclass(frozen=True)
class EstimationReport:
    """Cramer-Rao bound 1/(m F_Q) next to the error-propagation variance, if any."""

    cramer_rao: float
    repetitions: int
    error_propagation: float | None = None


def error_propagation(state: State, a: HermitianOperator, b: HermitianOperator) -> float:
    """(Delta theta)^2_A = Var(A) / |<i[A, B]>|^2 for the dynamics generated by B."""
    c = commutator_i(a, b)
    signal = abs(expectation(state, c))
    if signal <= 1e-12:
        raise VanishingSignalError(
            f"|<i[A,B]>| = {signal:.3e}; A carries no first-order signal of the phase")
    return variance(state, a) / signal**2


def cramer_rao(state: State, b: HermitianOperator, m: int,
               a: HermitianOperator | None = None) -> EstimationReport:
    """Best precision allowed by the Fisher information for m repetitions."""
    if m < 1:
        raise ValueError("m must be at least 1")
    f = qfi(state, b)
    if f <= PAIR_SKIP:
        raise UnestimableParameterError(f"F_Q = {f:.3e}; the parameter is unestimable")
    err = error_propagation(state, a, b) if a is not None else None
    return EstimationReport(cramer_rao=1.0 / (m * f), repetitions=m, error_propagation=err)


def variance_qfi_gap(state: State, a: HermitianOperator) -> float:
    """Var(A) - F_Q[rho, A]/4; zero for pure states, clamped against round-off."""
    gap = variance(state, a) - 0.25 * qfi(state, a)
    if gap < 0.0:
        if gap < -1e-10:
            raise ArithmeticError(f"variance/Fisher gap {gap:.3e} below round-off band")
        gap = 0.0
    return float(gap)


def check_sld_saturation(state: State, a: HermitianOperator,
                         b: HermitianOperator) -> tuple[bool, float]:
    """Test whether cA equals the symmetric logarithmic derivative of (rho, B).

    Fits the single scale c by least squares in the Hilbert-Schmidt inner
    product, which is robust to near-zero matrix entries.  When the fit
    residual vanishes, Var(A) F_Q[rho, B] = |<i[A,B]>|^2 is saturated; the
    product identity is verified as well before reporting saturation.
    """
    if variance(state, a) <= 0.0:
        raise ValueError("A has zero variance on this state; rescaling is meaningless")
    rho = state_density(state)
    m = 1j * (rho.mat @ b.mat - b.mat @ rho.mat)
    n = 0.5 * (rho.mat @ a.mat + a.mat @ rho.mat)
    m_norm = np.linalg.norm(m)
    n_sq = np.real(np.vdot(n, n))
    if m_norm < 1e-14:
        # [rho, B] = 0: both sides of the product relation vanish.
        lhs = variance(state, a) * qfi(state, b)
        rhs = abs(expectation(state, commutator_i(a, b))) ** 2
        return (lhs < 1e-12 and rhs < 1e-12), 0.0
    c = float(np.real(np.vdot(n, m)) / n_sq) if n_sq > 0 else 0.0
    residual = np.linalg.norm(m - c * n)
    if residual >= 1e-8 * m_norm:
        return False, c
    lhs = variance(state, a) * qfi(state, b)
    rhs = abs(expectation(state, commutator_i(a, b))) ** 2
    saturated = abs(lhs - rhs) <= 1e-8 * max(abs(lhs), abs(rhs), 1e-30)
    return saturated, c
