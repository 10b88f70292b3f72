"""Small dense complex Hermitian algebra: observables, eigensystems, moments.

Everything here is exact-enough double precision for dimensions up to ~8;
the eigensolver is a cyclic Jacobi iteration specialized to complex
Hermitian matrices, so there is no dependency on LAPACK behaviour for
reproducibility of eigenvector phases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-10
NORM_TOL = 1e-12
ORTHO_TOL = 1e-10
DEGENERACY_TOL = 1e-9


class NonHermitianError(ValueError):
    """Input matrix is not equal to its conjugate transpose."""


class EigenFailure(RuntimeError):
    """Jacobi iteration did not converge."""


class DimensionMismatch(ValueError):
    """Operands live in different Hilbert-space dimensions."""


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector."""

    amplitudes: np.ndarray
    label: str | None = None

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 1 or amp.size < 2:
            raise ValueError("state must be a vector of length >= 2")
        if not (np.all(np.isfinite(amp.real)) and np.all(np.isfinite(amp.imag))):
            raise ValueError("state amplitudes must be finite")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1 by more than {NORM_TOL}")
        amp = amp / norm
        amp.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self):
        return self.amplitudes.size

    def density(self):
        """Rank-one projector |psi><psi|."""
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class Observable:
    """Hermitian matrix with a cached, phase-fixed eigensystem.

    ``eigenvalues[i]`` belongs to ``eigenvectors[i]``; the ordering is the
    one requested at construction (ascending by default).
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: tuple[PureState, ...]
    name: str = ""

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        w = np.asarray(self.eigenvalues, dtype=float)
        w.flags.writeable = False
        object.__setattr__(self, "eigenvalues", w)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def eigenvector_matrix(self):
        """Eigenvectors as columns, in stored order."""
        return np.column_stack([v.amplitudes for v in self.eigenvectors])

    def shifted(self, offset):
        """Matrix of the mean-shifted operator O - offset*I."""
        return self.matrix - offset * np.eye(self.dim)


@dataclass(frozen=True)
class MomentStats:
    """First and second moments of an observable in a pure state."""

    mean: float
    second_moment: float
    variance: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "variance", self.second_moment - self.mean**2)

    @property
    def std(self):
        return float(np.sqrt(max(self.variance, 0.0)))


def _jacobi_eigh(matrix, tol=1e-14, max_sweeps=100):
    """Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi.

    Each (p, q) rotation annihilates the off-diagonal entry A[p, q] with a
    complex Givens rotation whose phase absorbs arg(A[p, q]).  Convergence
    is declared when the off-diagonal Frobenius mass drops below ``tol``.
    """
    d = matrix.shape[0]
    a = np.array(matrix, dtype=complex)
    vec = np.eye(d, dtype=complex)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off < tol:
            return np.real(np.diag(a)), vec
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if abs(apq) < tol / (d * d):
                    continue
                phi = np.angle(apq)
                theta = 0.5 * np.arctan2(2.0 * abs(apq), np.real(a[p, p] - a[q, q]))
                c, s = np.cos(theta), np.sin(theta)
                rot = np.eye(d, dtype=complex)
                rot[p, p] = c
                rot[p, q] = -s * np.exp(1j * phi)
                rot[q, p] = s * np.exp(-1j * phi)
                rot[q, q] = c
                a = rot.conj().T @ a @ rot
                vec = vec @ rot
    off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
    if off < tol:
        return np.real(np.diag(a)), vec
    raise EigenFailure(f"Jacobi did not converge; off-diagonal mass {off:g}")


def _fix_phases(vectors):
    """Make the largest-magnitude component of each column real positive."""
    out = np.array(vectors, dtype=complex)
    for k in range(out.shape[1]):
        i = int(np.argmax(np.abs(out[:, k])))
        piv = out[i, k]
        if abs(piv) > 0:
            out[:, k] *= np.conj(piv) / abs(piv)
    return out


def _orthonormalize_clusters(w, vectors):
    """Modified Gram-Schmidt inside each degenerate eigenvalue cluster."""
    out = np.array(vectors, dtype=complex)
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or abs(w[k] - w[start]) > DEGENERACY_TOL:
            for i in range(start, k):
                for j in range(start, i):
                    out[:, i] -= np.vdot(out[:, j], out[:, i]) * out[:, j]
                out[:, i] /= np.linalg.norm(out[:, i])
            start = k
    return out


def _match_order(sorted_values, target_order):
    """Permutation mapping sorted eigenvalues onto a requested value sequence."""
    remaining = list(range(len(sorted_values)))
    perm = []
    for t in target_order:
        k = min(remaining, key=lambda i: abs(sorted_values[i] - t))
        if abs(sorted_values[k] - t) > 1e-8:
            raise ValueError(f"requested eigenvalue {t} not present in spectrum {sorted_values}")
        perm.append(k)
        remaining.remove(k)
    return perm


def make_observable(matrix, name="", eigenvalue_order=None) -> Observable:
    """Build an Observable with a validated eigensystem.

    ``eigenvalue_order`` optionally re-permutes the (ascending-sorted)
    spectrum to a caller-supplied value sequence, e.g. (-1, 1, 0) for the
    spin-1 components.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
        raise ValueError("matrix must be square with dimension >= 2")
    dev = np.max(np.abs(m - m.conj().T))
    if dev > HERMITICITY_TOL:
        raise NonHermitianError(f"max |M - M^dag| entry = {dev:g}")
    m = 0.5 * (m + m.conj().T)

    w, v = _jacobi_eigh(m)
    order = np.argsort(w)
    w, v = w[order], v[:, order]
    v = _orthonormalize_clusters(w, v)
    if eigenvalue_order is not None:
        perm = _match_order(w, eigenvalue_order)
        w, v = w[perm], v[:, perm]
    v = _fix_phases(v)

    recon = (v * w) @ v.conj().T
    if np.max(np.abs(recon - m)) > 1e-10:
        raise EigenFailure("eigensystem does not reconstruct the matrix")

    vectors = tuple(PureState(v[:, k]) for k in range(m.shape[0]))
    return Observable(matrix=m, eigenvalues=w, eigenvectors=vectors, name=name)


SPIN1_EIGENVALUE_ORDER = (-1.0, 1.0, 0.0)


def builtin_spin1():
    """The four spin-1 observables Lx, Ly, Lz and Lp = LxLy + LyLx.

    Eigensystems use the pairing order (-1, 1, 0).
    """
    lx = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / np.sqrt(2)
    ly = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / np.sqrt(2)
    lz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    lp = lx @ ly + ly @ lx
    order = SPIN1_EIGENVALUE_ORDER
    return (
        make_observable(lx, "Lx", order),
        make_observable(ly, "Ly", order),
        make_observable(lz, "Lz", order),
        make_observable(lp, "Lp", order),
    )


def _check_dims(state, *observables):
    for obs in observables:
        if obs.dim != state.dim:
            raise DimensionMismatch(f"state dim {state.dim} vs observable dim {obs.dim}")


def moments(state: PureState, obs: Observable) -> MomentStats:
    """Mean, second moment and variance of ``obs`` in ``state``.

    The mean is computed both as the quadratic form <psi|M|psi> and from the
    projective probabilities sum_i m_i |<psi|m_i>|^2; the two routes are
    cross-checked to 1e-10.
    """
    _check_dims(state, obs)
    psi = state.amplitudes
    mean_direct = float(np.real(np.vdot(psi, obs.matrix @ psi)))
    probs = np.abs(obs.eigenvector_matrix().conj().T @ psi) ** 2
    mean_proj = float(np.dot(obs.eigenvalues, probs))
    if abs(mean_direct - mean_proj) > 1e-10:
        raise EigenFailure(
            f"projective mean {mean_proj} disagrees with quadratic form {mean_direct}"
        )
    second = float(np.real(np.vdot(obs.matrix @ psi, obs.matrix @ psi)))
    return MomentStats(mean=mean_direct, second_moment=second)


def covariance(state: PureState, a: Observable, b: Observable) -> float:
    """Quantum covariance Cov(A,B) = <{A,B}>/2 - <A><B>."""
    _check_dims(state, a, b)
    psi = state.amplitudes
    sym = 0.5 * float(np.real(np.vdot(psi, (a.matrix @ b.matrix + b.matrix @ a.matrix) @ psi)))
    return sym - moments(state, a).mean * moments(state, b).mean


def commutator(a: Observable, b: Observable):
    """AB - BA (anti-Hermitian)."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"{a.dim} vs {b.dim}")
    return a.matrix @ b.matrix - b.matrix @ a.matrix


def anticommutator(a: Observable, b: Observable):
    """AB + BA (Hermitian)."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"{a.dim} vs {b.dim}")
    return a.matrix @ b.matrix + b.matrix @ a.matrix


def family_state(theta, label=None) -> PureState:
    """The swept qutrit family (cos t, -sin t, 0)."""
    if label is None:
        label = f"theta={theta:.4f}"
    return PureState(np.array([np.cos(theta), -np.sin(theta), 0.0], dtype=complex), label)


def haar_random_state(dim, rng) -> PureState:
    """Haar-random pure state from a normalized complex Gaussian vector."""
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(z / np.linalg.norm(z))
