"""Finite-dimensional states, observables, and the algebras built from them.

Conventions used throughout the package:

* spin operators live in the J_z eigenbasis with m descending from +j to -j,
* Fock bases are ordered by ascending occupation number,
* hbar = 1, all operators dimensionless unless stated otherwise.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
EIG_FLOOR = 1e-12          # eigenvalues below this are treated as exactly zero
MIN_EIG_TOL = -1e-10       # most negative eigenvalue a density matrix may carry
NORM_TOL = 1e-12
DEGENERACY_REL_TOL = 1e-9  # relative gap below which a ground state counts as degenerate


class DimensionMismatchError(ValueError):
    """Operands act on Hilbert spaces of different dimension."""


class CutoffTooSmallError(ValueError):
    """A truncated Fock expansion would leave too much probability in the tail."""


def _as_complex_matrix(entries) -> np.ndarray:
    mat = np.asarray(entries, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    return mat


class HermitianOperator:
    """Dense complex square matrix certified Hermitian at construction."""

    __slots__ = ("mat",)

    def __init__(self, entries):
        mat = _as_complex_matrix(entries)
        dev = np.max(np.abs(mat - mat.conj().T))
        if dev > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
        # Symmetrize so downstream eigensolves see an exactly Hermitian input.
        self.mat = 0.5 * (mat + mat.conj().T)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._require_same_dim(other)
        return HermitianOperator(self.mat + other.mat)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._require_same_dim(other)
        return HermitianOperator(self.mat - other.mat)

    def __mul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(self.mat * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(-self.mat)

    def square(self) -> "HermitianOperator":
        return HermitianOperator(self.mat @ self.mat)

    def _require_same_dim(self, other: "HermitianOperator") -> None:
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dims {self.dim} and {other.dim} differ")

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


def commutator_i(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """i[A, B], which is Hermitian whenever A and B are."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dims {a.dim} and {b.dim} differ")
    return HermitianOperator(1j * (a.mat @ b.mat - b.mat @ a.mat))


def anticommutator(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """{A, B} = AB + BA."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dims {a.dim} and {b.dim} differ")
    return HermitianOperator(a.mat @ b.mat + b.mat @ a.mat)


class PureState:
    """Normalized state vector."""

    __slots__ = ("vec",)

    def __init__(self, amplitudes):
        vec = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"state vector norm {norm:.6f} is not 1")
        # Tiny renormalization keeps the unit-norm invariant exact to 1e-12.
        self.vec = vec / norm

    @property
    def dim(self) -> int:
        return self.vec.shape[0]

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.vec, self.vec.conj()))

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim})"


class DensityMatrix:
    """Unit-trace positive-semidefinite Hermitian matrix with cached eigensystem.

    Eigenvalues are stored in descending order; ``eigenvectors[:, k]`` is the
    eigenvector belonging to ``eigenvalues[k]``.  Values below ``EIG_FLOOR``
    are clamped to exactly zero, which keeps rank-deficient directions out of
    the Fisher-information sums.
    """

    __slots__ = ("mat", "eigenvalues", "eigenvectors")

    def __init__(self, entries):
        mat = _as_complex_matrix(entries)
        dev = np.max(np.abs(mat - mat.conj().T))
        if dev > HERMITICITY_TOL:
            raise ValueError(f"density matrix is not Hermitian (max deviation {dev:.3e})")
        mat = 0.5 * (mat + mat.conj().T)
        tr = np.trace(mat).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr!r} differs from 1 beyond tolerance")
        vals, vecs = np.linalg.eigh(mat)
        if vals[0] < MIN_EIG_TOL:
            raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {vals[0]:.3e})")
        order = np.argsort(vals)[::-1]
        vals = vals[order]
        vecs = vecs[:, order]
        vals = np.where(vals < EIG_FLOOR, 0.0, vals)
        recon = (vecs * vals) @ vecs.conj().T
        if np.max(np.abs(recon - mat)) > 1e-10:
            raise ValueError("eigendecomposition does not reconstruct the matrix")
        self.mat = mat
        self.eigenvalues = vals
        self.eigenvectors = vecs

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def rank(self, tol: float = EIG_FLOOR) -> int:
        return int(np.count_nonzero(self.eigenvalues > tol))

    def purity(self) -> float:
        return float(np.sum(self.eigenvalues**2))

    @staticmethod
    def from_pure(psi: PureState) -> "DensityMatrix":
        return psi.density()

    @staticmethod
    def maximally_mixed(dim: int) -> "DensityMatrix":
        return DensityMatrix(np.eye(dim) / dim)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, rank={self.rank()})"


State = PureState | DensityMatrix


def state_matrix(state: State) -> np.ndarray:
    """Density matrix of a state, whatever its representation."""
    if isinstance(state, PureState):
        return np.outer(state.vec, state.vec.conj())
    return state.mat


def expectation(state: State, op: HermitianOperator) -> float:
    """<A> = Tr(rho A)."""
    if state.dim != op.dim:
        raise DimensionMismatchError(f"state dim {state.dim} != operator dim {op.dim}")
    if isinstance(state, PureState):
        return float(np.real(state.vec.conj() @ (op.mat @ state.vec)))
    return float(np.real(np.trace(state.mat @ op.mat)))


def variance(state: State, op: HermitianOperator) -> float:
    """(Delta A)^2 = <A^2> - <A>^2, clamped at zero against round-off."""
    if state.dim != op.dim:
        raise DimensionMismatchError(f"state dim {state.dim} != operator dim {op.dim}")
    if isinstance(state, PureState):
        av = op.mat @ state.vec
        mean = np.real(state.vec.conj() @ av)
        second = np.real(av.conj() @ av)
    else:
        mean = np.real(np.trace(state.mat @ op.mat))
        second = np.real(np.trace(state.mat @ op.mat @ op.mat))
    var = second - mean * mean
    if var < 0.0:
        if var < -1e-12:
            log.debug("variance clamped to zero from %.3e", var)
        var = 0.0
    return float(var)


# ---------------------------------------------------------------------------
# spin algebra
# ---------------------------------------------------------------------------

def _check_half_integer(j) -> float:
    two_j = 2 * j
    if abs(two_j - round(two_j)) > 1e-12 or round(two_j) < 0:
        raise ValueError(f"j={j} is not a nonnegative half-integer")
    return round(two_j) / 2.0


@dataclass(frozen=True)
class SpinAlgebra:
    """Angular momentum matrices for a single spin j, J_z eigenbasis, m descending."""

    j: float
    dim: int
    jx: HermitianOperator
    jy: HermitianOperator
    jz: HermitianOperator

    def as_tuple(self) -> tuple[HermitianOperator, HermitianOperator, HermitianOperator]:
        return (self.jx, self.jy, self.jz)


def make_spin_algebra(j) -> SpinAlgebra:
    """Standard angular-momentum matrices satisfying [J_x, J_y] = i J_z (cyclic)."""
    j = _check_half_integer(j)
    dim = int(round(2 * j)) + 1
    m = j - np.arange(dim)  # descending +j .. -j
    jz = np.diag(m).astype(complex)
    jplus = np.zeros((dim, dim), dtype=complex)
    for k in range(1, dim):
        # raises m[k] to m[k] + 1 = m[k - 1]
        jplus[k - 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jminus = jplus.conj().T
    jx = 0.5 * (jplus + jminus)
    jy = -0.5j * (jplus - jminus)
    return SpinAlgebra(j=j, dim=dim,
                       jx=HermitianOperator(jx),
                       jy=HermitianOperator(jy),
                       jz=HermitianOperator(jz))


def make_su_d_generators(d: int) -> list[HermitianOperator]:
    """Traceless Hermitian generator basis with Tr(G_k G_l) = 2 delta_kl.

    For d = 2 this is exactly the three Pauli matrices.  Ordering: the
    symmetric and antisymmetric off-diagonal pair for (k, l), pairs in
    lexicographic order, followed by the diagonal generators.
    """
    if d < 2:
        raise ValueError(f"d={d} must be at least 2")
    gens: list[HermitianOperator] = []
    for k in range(d):
        for l in range(k + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[k, l] = sym[l, k] = 1.0
            gens.append(HermitianOperator(sym))
            asym = np.zeros((d, d), dtype=complex)
            asym[k, l] = -1j
            asym[l, k] = 1j
            gens.append(HermitianOperator(asym))
    for m in range(1, d):
        diag = np.zeros(d, dtype=complex)
        diag[:m] = 1.0
        diag[m] = -m
        diag *= np.sqrt(2.0 / (m * (m + 1)))
        gens.append(HermitianOperator(np.diag(diag)))
    return gens


# ---------------------------------------------------------------------------
# truncated bosonic mode
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FockAlgebra:
    """Truncated single-mode ladder and quadrature operators.

    The canonical commutator [x, p] = i holds exactly on the subspace that
    excludes the top Fock level; the truncation corner is unavoidable in a
    finite basis.
    """

    cutoff: int
    a: np.ndarray
    a_dag: np.ndarray
    x: HermitianOperator
    p: HermitianOperator


def make_fock_algebra(cutoff: int) -> FockAlgebra:
    if cutoff < 2:
        raise ValueError(f"cutoff={cutoff} must be at least 2")
    n = np.arange(1, cutoff)
    a = np.diag(np.sqrt(n), k=1).astype(complex)
    a_dag = a.conj().T
    x = HermitianOperator((a + a_dag) / np.sqrt(2.0))
    p = HermitianOperator((a - a_dag) / (1j * np.sqrt(2.0)))
    return FockAlgebra(cutoff=cutoff, a=a, a_dag=a_dag, x=x, p=p)


def coherent_state(alpha: complex, cutoff: int) -> PureState:
    """Truncated coherent-state expansion, renormalized after truncation.

    Rejects the construction when the Poisson tail beyond the cutoff exceeds
    1e-10, since quadrature moments would then be visibly distorted.
    """
    from scipy.special import gammainc

    mu = abs(alpha) ** 2
    tail = float(gammainc(cutoff, mu)) if mu > 0 else 0.0
    if tail > 1e-10:
        raise CutoffTooSmallError(
            f"tail mass {tail:.3e} beyond cutoff {cutoff} for |alpha|^2 = {mu:.3f}")
    amps = np.zeros(cutoff, dtype=complex)
    amps[0] = 1.0
    for n in range(1, cutoff):
        amps[n] = amps[n - 1] * alpha / np.sqrt(n)
    amps *= np.exp(-mu / 2.0)
    return PureState(amps / np.linalg.norm(amps))


# ---------------------------------------------------------------------------
# spin-coherent states
# ---------------------------------------------------------------------------

def spin_coherent_state(j, c) -> PureState:
    """exp(-i c.J) applied to the maximal-weight state |+j>_z.

    ``c`` is a real 3-vector; the rotation convention is the bare exponent,
    no extra global phase.
    """
    spin = make_spin_algebra(j)
    c = np.asarray(c, dtype=float)
    if c.shape != (3,):
        raise ValueError("c must be a real 3-vector")
    gen = c[0] * spin.jx.mat + c[1] * spin.jy.mat + c[2] * spin.jz.mat
    vals, vecs = np.linalg.eigh(gen)
    u = (vecs * np.exp(-1j * vals)) @ vecs.conj().T
    return PureState(u[:, 0])


def spin_coherent_polar(j, theta: float, phi: float) -> PureState:
    """Spin-coherent state pointing along (theta, phi) in polar angles.

    Convenience wrapper: rotates the +z state by ``theta`` about the axis
    (-sin phi, cos phi, 0), taking z to the requested direction.
    """
    axis = np.array([-np.sin(phi), np.cos(phi), 0.0])
    return spin_coherent_state(j, theta * axis)


# ---------------------------------------------------------------------------
# random states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RandomStateConfig:
    """Induced-measure sampling parameters; equal seeds give bitwise-equal states."""

    dim: int
    rank: int
    seed: int

    def __post_init__(self):
        if not 1 <= self.rank <= self.dim:
            raise ValueError(f"rank {self.rank} outside [1, {self.dim}]")


def random_density_matrix(cfg: RandomStateConfig) -> DensityMatrix:
    """rho = G G^dag / Tr(G G^dag) with G a dim x rank complex Ginibre matrix."""
    rng = np.random.default_rng(cfg.seed)
    g = rng.standard_normal((cfg.dim, cfg.rank)) + 1j * rng.standard_normal((cfg.dim, cfg.rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def haar_random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix with phase fixing."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


# ---------------------------------------------------------------------------
# composition and spectra
# ---------------------------------------------------------------------------

def tensor(a, b):
    """Kronecker composite of two operators or two states, system-1 indices first."""
    if isinstance(a, HermitianOperator) and isinstance(b, HermitianOperator):
        return HermitianOperator(np.kron(a.mat, b.mat))
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.vec, b.vec))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.mat, b.mat))
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def ground_state(h: HermitianOperator) -> tuple[float, PureState, bool]:
    """Lowest eigenpair of a Hermitian operator.

    Returns (energy, state, degenerate); the flag is set when the gap to the
    second eigenvalue is below 1e-9 of the spectral range.
    """
    vals, vecs = np.linalg.eigh(h.mat)
    spread = max(vals[-1] - vals[0], 1e-300)
    degenerate = bool(len(vals) > 1 and (vals[1] - vals[0]) < DEGENERACY_REL_TOL * spread)
    return float(vals[0]), PureState(vecs[:, 0]), degenerate
