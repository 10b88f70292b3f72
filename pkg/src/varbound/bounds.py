"""The seven variance relations: forward product and sum bounds plus the
reverse (upper) bound on the variance sum.

All evaluators return a :class:`BoundResult` carrying both sides, the slack
and any intermediates, so a harness can serialize every term.  Lower bounds
use slack = lhs - rhs; the reverse bound uses slack = rhs - lhs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hermitian import (
    DimensionMismatch,
    Observable,
    PureState,
    covariance,
    make_observable,
    moments,
)

SLACK_TOL = 1e-9
ROUTE_TOL = 1e-10
EQ7_EPS = 1e-9


class IncompleteBasis(ValueError):
    """Supplied basis does not span the space orthonormally."""


class InvalidPairing(ValueError):
    """Eigenvalue pairing is not a permutation of the index set."""


@dataclass(frozen=True)
class OrthonormalBasis:
    """Complete orthonormal basis {|psi_n>} used by the basis-dependent bounds."""

    vectors: tuple[PureState, ...]

    def __post_init__(self):
        d = self.vectors[0].dim
        mat = self.matrix()
        if len(self.vectors) != d:
            raise IncompleteBasis(f"{len(self.vectors)} vectors for dimension {d}")
        gram = mat.conj().T @ mat
        if np.max(np.abs(gram - np.eye(d))) > 1e-10:
            raise IncompleteBasis("vectors are not orthonormal to 1e-10")

    @classmethod
    def computational(cls, dim):
        eye = np.eye(dim, dtype=complex)
        return cls(tuple(PureState(eye[:, k]) for k in range(dim)))

    @classmethod
    def from_matrix(cls, unitary):
        u = np.asarray(unitary, dtype=complex)
        return cls(tuple(PureState(u[:, k]) for k in range(u.shape[1])))

    @property
    def dim(self):
        return self.vectors[0].dim

    def matrix(self):
        return np.column_stack([v.amplitudes for v in self.vectors])


@dataclass(frozen=True)
class BasisBoundTerms:
    """Per-basis-vector coefficients of the rewritten basis bounds.

    C_n = <Psi|A|psi_n><psi_n|B|Psi>, D_n = <Psi|psi_n><psi_n|B|Psi>,
    E_n = <psi_n|A|Psi>, F_n = <psi_n|Psi>, G_n = <psi_n|B|Psi>.
    """

    c: np.ndarray
    d: np.ndarray
    e: np.ndarray
    f: np.ndarray
    g: np.ndarray


@dataclass(frozen=True)
class FidelityTerms:
    """Eigenvalue/fidelity data entering the optimization-free bounds."""

    a_values: np.ndarray
    b_values: np.ndarray
    a_shifted: np.ndarray
    b_shifted: np.ndarray
    fid_a: np.ndarray
    fid_b: np.ndarray
    pairing: tuple[int, ...]


@dataclass(frozen=True)
class BoundResult:
    """One evaluated relation side."""

    relation_id: str
    direction: str  # "lower" or "upper"
    lhs: float
    rhs: float | None
    satisfied: bool
    slack: float | None
    defined: bool = True
    reason: str | None = None
    intermediates: object = None


def _result(relation_id, direction, lhs, rhs, intermediates=None):
    slack = (lhs - rhs) if direction == "lower" else (rhs - lhs)
    return BoundResult(
        relation_id=relation_id,
        direction=direction,
        lhs=float(lhs),
        rhs=float(rhs),
        satisfied=bool(slack >= -SLACK_TOL),
        slack=float(slack),
        intermediates=intermediates,
    )


def _undefined(relation_id, direction, lhs, reason):
    return BoundResult(
        relation_id=relation_id,
        direction=direction,
        lhs=float(lhs),
        rhs=None,
        satisfied=True,
        slack=None,
        defined=False,
        reason=reason,
    )


def _check(state, a, b):
    if a.dim != state.dim or b.dim != state.dim:
        raise DimensionMismatch(
            f"state dim {state.dim} vs observables {a.dim}, {b.dim}"
        )


def _normalize_pairing(pairing, dim):
    if pairing is None:
        pairing = tuple(range(dim))
    pairing = tuple(int(i) for i in pairing)
    if sorted(pairing) != list(range(dim)):
        raise InvalidPairing(f"{pairing} is not a permutation of 0..{dim - 1}")
    return pairing


def eq1_product_bound(state: PureState, a: Observable, b: Observable) -> BoundResult:
    """Robertson-Schroedinger product bound."""
    _check(state, a, b)
    psi = state.amplitudes
    ma, mb = moments(state, a), moments(state, b)
    comm = complex(np.vdot(psi, (a.matrix @ b.matrix - b.matrix @ a.matrix) @ psi))
    cov = covariance(state, a, b)
    rhs = abs(0.5 * comm) ** 2 + cov**2
    return _result("eq1", "lower", ma.variance * mb.variance, rhs)


def _basis_terms(state, a, b, basis):
    psi = state.amplitudes
    bm = basis.matrix()
    a_psi = a.matrix @ psi
    b_psi = b.matrix @ psi
    e = bm.conj().T @ a_psi
    f = bm.conj().T @ psi
    g = bm.conj().T @ b_psi
    c = (bm.conj().T @ a_psi).conj() * g  # <Psi|A|psi_n><psi_n|B|Psi>
    d = f.conj() * g
    return BasisBoundTerms(c=c, d=d, e=e, f=f, g=g)


def eq2_product_bound(
    state: PureState, a: Observable, b: Observable, basis: OrthonormalBasis
) -> BoundResult:
    """Basis-dependent product bound (sum over |<Psi|Abar|psi_n><psi_n|Bbar|Psi>|)^2."""
    _check(state, a, b)
    if basis.dim != state.dim:
        raise IncompleteBasis("basis dimension does not match the state")
    psi = state.amplitudes
    ma, mb = moments(state, a), moments(state, b)
    terms = _basis_terms(state, a, b, basis)
    bm = basis.matrix()
    abar_psi = a.shifted(ma.mean) @ psi
    bbar_psi = b.shifted(mb.mean) @ psi
    amps = (bm.conj().T @ abar_psi).conj() * (bm.conj().T @ bbar_psi)
    rhs = float(np.sum(np.abs(amps))) ** 2
    # rewritten route (sum_n |C_n - D_n <A>|)^2, valid when <B> = 0
    if abs(mb.mean) < ROUTE_TOL:
        alt = float(np.sum(np.abs(terms.c - terms.d * ma.mean))) ** 2
        if abs(alt - rhs) > ROUTE_TOL * max(1.0, abs(rhs)):
            raise ArithmeticError(f"eq2 route disagreement: {rhs} vs {alt}")
    return _result("eq2", "lower", ma.variance * mb.variance, rhs, terms)


def _fidelity_terms(state, a, b, pairing):
    pairing = _normalize_pairing(pairing, state.dim)
    psi = state.amplitudes
    ma, mb = moments(state, a), moments(state, b)
    fid_a = np.abs(a.eigenvector_matrix().conj().T @ psi) ** 2
    fid_b_all = np.abs(b.eigenvector_matrix().conj().T @ psi) ** 2
    b_vals = b.eigenvalues[list(pairing)]
    fid_b = fid_b_all[list(pairing)]
    return FidelityTerms(
        a_values=a.eigenvalues.copy(),
        b_values=b_vals,
        a_shifted=a.eigenvalues - ma.mean,
        b_shifted=b_vals - mb.mean,
        fid_a=fid_a,
        fid_b=fid_b,
        pairing=pairing,
    )


def eq3_product_bound(
    state: PureState, a: Observable, b: Observable, pairing=None
) -> BoundResult:
    """Optimization-free product bound from eigenstate fidelities."""
    _check(state, a, b)
    ma, mb = moments(state, a), moments(state, b)
    t = _fidelity_terms(state, a, b, pairing)
    rhs = float(np.sum(np.sqrt(t.fid_a) * np.sqrt(t.fid_b) * t.a_shifted * t.b_shifted)) ** 2
    return _result("eq3", "lower", ma.variance * mb.variance, rhs, t)


def eq4_sum_bound(state: PureState, a: Observable, b: Observable) -> BoundResult:
    """Sum bound: half the variance of A + B."""
    _check(state, a, b)
    ma, mb = moments(state, a), moments(state, b)
    apb = make_observable(a.matrix + b.matrix, name="A+B")
    rhs = 0.5 * moments(state, apb).variance
    return _result("eq4", "lower", ma.variance + mb.variance, rhs)


def eq5_sum_bound(
    state: PureState, a: Observable, b: Observable, basis: OrthonormalBasis
) -> BoundResult:
    """Basis-dependent sum bound with the factor 1/2 of the un-rewritten form."""
    _check(state, a, b)
    if basis.dim != state.dim:
        raise IncompleteBasis("basis dimension does not match the state")
    psi = state.amplitudes
    ma, mb = moments(state, a), moments(state, b)
    terms = _basis_terms(state, a, b, basis)
    bm = basis.matrix()
    pa = np.abs(bm.conj().T @ (a.shifted(ma.mean) @ psi))
    pb = np.abs(bm.conj().T @ (b.shifted(mb.mean) @ psi))
    rhs = 0.5 * float(np.sum((pa + pb) ** 2))
    # rewritten route |E_n - F_n <A>| + |G_n - F_n <B>|, valid when <B> = 0
    if abs(mb.mean) < ROUTE_TOL:
        alt = 0.5 * float(
            np.sum((np.abs(terms.e - terms.f * ma.mean) + np.abs(terms.g)) ** 2)
        )
        if abs(alt - rhs) > ROUTE_TOL * max(1.0, abs(rhs)):
            raise ArithmeticError(f"eq5 route disagreement: {rhs} vs {alt}")
    return _result("eq5", "lower", ma.variance + mb.variance, rhs, terms)


def eq6_sum_bound(
    state: PureState, a: Observable, b: Observable, pairing=None
) -> BoundResult:
    """Optimization-free sum bound from eigenstate fidelities."""
    _check(state, a, b)
    ma, mb = moments(state, a), moments(state, b)
    t = _fidelity_terms(state, a, b, pairing)
    rhs = 0.5 * float(
        np.sum((t.a_shifted * np.sqrt(t.fid_a) + t.b_shifted * np.sqrt(t.fid_b)) ** 2)
    )
    return _result("eq6", "lower", ma.variance + mb.variance, rhs, t)


def eq7_reverse_bound(state: PureState, a: Observable, b: Observable) -> BoundResult:
    """Reverse (upper) bound on the variance sum.

    Degenerate variances or a correlation ratio at 1 make the bound
    undefined; an explicit undefined result is returned rather than raising.
    """
    _check(state, a, b)
    ma, mb = moments(state, a), moments(state, b)
    lhs = ma.variance + mb.variance
    da, db = ma.std, mb.std
    if da <= EQ7_EPS or db <= EQ7_EPS:
        return _undefined("eq7", "upper", lhs, "degenerate variance")
    cov = covariance(state, a, b)
    denom = 1.0 - cov / (da * db)
    if abs(denom) <= EQ7_EPS:
        return _undefined("eq7", "upper", lhs, "singular denominator")
    amb = make_observable(a.matrix - b.matrix, name="A-B")
    var_amb = moments(state, amb).variance
    rhs = 2.0 * var_amb / denom - 2.0 * da * db
    return _result("eq7", "upper", lhs, rhs)


@dataclass(frozen=True)
class UncertaintyReport:
    """All seven relations evaluated on one state."""

    state_label: str | None
    mean_a: float
    mean_b: float
    var_a: float
    var_b: float
    product_lhs: float
    sum_lhs: float
    results: dict[str, BoundResult]


def evaluate_all(
    state: PureState,
    a: Observable,
    b: Observable,
    basis: OrthonormalBasis | None = None,
    pairing=None,
) -> UncertaintyReport:
    """Evaluate eq1..eq7 on one state; eq7 degeneracy degrades to undefined."""
    _check(state, a, b)
    if basis is None:
        basis = OrthonormalBasis.computational(state.dim)
    ma, mb = moments(state, a), moments(state, b)
    results = {
        "eq1": eq1_product_bound(state, a, b),
        "eq2": eq2_product_bound(state, a, b, basis),
        "eq3": eq3_product_bound(state, a, b, pairing),
        "eq4": eq4_sum_bound(state, a, b),
        "eq5": eq5_sum_bound(state, a, b, basis),
        "eq6": eq6_sum_bound(state, a, b, pairing),
        "eq7": eq7_reverse_bound(state, a, b),
    }
    return UncertaintyReport(
        state_label=state.label,
        mean_a=ma.mean,
        mean_b=mb.mean,
        var_a=ma.variance,
        var_b=mb.variance,
        product_lhs=ma.variance * mb.variance,
        sum_lhs=ma.variance + mb.variance,
        results=results,
    )
