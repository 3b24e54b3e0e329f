"""Spectral analysis: ordered spectra, steady states, gaps, property checks.

Eigenvalues are ordered by ascending ``|Re|`` with ties broken by ascending
``|Im|`` and then non-negative imaginary part first.  The ordering is total
and deterministic; exact degeneracies are allowed (the strict ordering of the
ideal theory is relaxed to this tie-broken form).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .builder import HeomLiouvillian, HeomState
from .errors import (
    DegenerateSteadyStateError,
    ExtractionError,
    MatrixValidationError,
    SingularShiftError,
    SizeBudgetError,
)
from .linalg import DENSE_EIG_LIMIT, as_dense, eig_dense, eig_targeted
from .symmetry import SectorDecomposition, leading_order

#: An eigenvalue is considered degenerate with the steady state below this.
ZERO_MULTIPLICITY_TOL = 1e-9
#: Eigenvectors count as decaying when |Re lambda| exceeds this.
DECAYING_RE_TOL = 1e-8

Target = Union[HeomLiouvillian, SectorDecomposition]


@dataclass
class PhysicalState:
    """A physical-block density matrix with its extraction diagnostics."""

    matrix: np.ndarray
    hermiticity_defect: float
    trace: float
    min_eigenvalue: float


@dataclass
class SpectralResult:
    """Ordered eigenvalues and right eigenvectors in full-space coordinates."""

    eigenvalues: np.ndarray
    vectors: np.ndarray
    liouvillian: Optional[HeomLiouvillian] = None
    residual_norms: Optional[np.ndarray] = None

    def state(self, i: int) -> HeomState:
        if self.liouvillian is None:
            raise MatrixValidationError("no hierarchy metadata attached")
        return HeomState(
            self.vectors[:, i], self.liouvillian.hierarchy, self.liouvillian.d_s
        )

    def physical_block(self, i: int) -> np.ndarray:
        return self.state(i).physical()


def _resolve(target: Target, charge: int):
    """Return (matrix, embed, liouvillian) for a generator or one of its sectors."""
    if isinstance(target, SectorDecomposition):
        matrix = target.sector(charge)
        return matrix, (lambda v: target.embed(charge, v)), target.liouvillian
    if isinstance(target, HeomLiouvillian):
        return target.matrix, (lambda v: v), target
    raise MatrixValidationError(f"cannot analyze object of type {type(target)!r}")


def spectrum(
    target: Target,
    charge: int = 0,
    count: Optional[int] = None,
    tol: float = 1e-10,
    seed: int = 0,
) -> SpectralResult:
    """Ordered spectrum of a generator or one of its symmetry sectors.

    ``count=None`` computes the full dense spectrum (dimension permitting);
    otherwise the ``count`` eigenvalues nearest zero are computed with the
    targeted solver and ordered.
    """
    matrix, embed, liouv = _resolve(target, charge)
    n = matrix.shape[0]
    if count is None:
        if n > DENSE_EIG_LIMIT:
            raise SizeBudgetError(
                f"full spectrum of dimension {n} exceeds the dense limit"
            )
        res = eig_dense(matrix.toarray() if hasattr(matrix, "toarray") else matrix)
    else:
        count = min(count, n)
        try:
            res = eig_targeted(matrix, 0.0, count, tol=tol, seed=seed)
        except SingularShiftError as exc:
            res = eig_targeted(matrix, exc.suggested_shift, count, tol=tol, seed=seed)
    order = leading_order(res.eigenvalues)
    values = res.eigenvalues[order]
    vectors = res.right_vectors[:, order]
    full_vectors = np.column_stack([embed(vectors[:, i]) for i in range(vectors.shape[1])])
    return SpectralResult(
        eigenvalues=values,
        vectors=full_vectors,
        liouvillian=liouv,
        residual_norms=res.residual_norms[order],
    )


def canonical_physical_state(block: np.ndarray) -> Tuple[PhysicalState, complex]:
    """Phase-fix, hermitize and trace-normalize a physical block.

    The global phase is fixed by making the trace real and positive (so the
    output is reproducible across solvers), the block is then hermitized and
    scaled to unit trace.  Returns the state and the complex factor the raw
    block was divided by.
    """
    trace = complex(np.trace(block))
    if abs(trace) < 1e-12 * max(1.0, float(np.abs(block).max())):
        raise ExtractionError(
            f"physical block has (near-)zero trace {trace}; cannot normalize"
        )
    normalized = block / trace
    defect = float(np.abs(normalized - normalized.conj().T).max())
    hermitian = (normalized + normalized.conj().T) / 2
    correction = float(np.trace(hermitian).real)
    hermitian = hermitian / correction
    min_eig = float(np.linalg.eigvalsh(hermitian).min())
    state = PhysicalState(
        matrix=hermitian,
        hermiticity_defect=defect,
        trace=float(np.trace(hermitian).real),
        min_eigenvalue=min_eig,
    )
    return state, trace * correction


def steady_state(
    target: Target,
    charge: int = 0,
    count: int = 6,
    tol: float = 1e-10,
    seed: int = 0,
) -> Tuple[PhysicalState, HeomState]:
    """Extract the stationary state from the null vector of the generator.

    Requires the zero eigenvalue to be simple within
    :data:`ZERO_MULTIPLICITY_TOL`; a degenerate null space raises
    :class:`DegenerateSteadyStateError` listing the near-zero eigenvalues.
    """
    matrix, _, liouv = _resolve(target, charge)
    n = matrix.shape[0]
    result = spectrum(target, charge=charge, count=min(max(count, 2), n), tol=tol, seed=seed)
    near_zero = np.flatnonzero(np.abs(result.eigenvalues) < ZERO_MULTIPLICITY_TOL)
    if near_zero.size == 0:
        raise ExtractionError(
            f"no eigenvalue within {ZERO_MULTIPLICITY_TOL:.1e} of zero; "
            f"closest: {result.eigenvalues[0]}"
        )
    if near_zero.size > 1:
        raise DegenerateSteadyStateError(result.eigenvalues[near_zero].tolist())
    vector = result.vectors[:, near_zero[0]]
    state = HeomState(vector, liouv.hierarchy, liouv.d_s)
    physical, factor = canonical_physical_state(state.physical())
    return physical, HeomState(vector / factor, liouv.hierarchy, liouv.d_s)


def gap(
    target: Target,
    charge: int = 0,
    count: int = 6,
    tol: float = 1e-10,
    seed: int = 0,
    isolation_tol: float = ZERO_MULTIPLICITY_TOL,
) -> complex:
    """First eigenvalue beyond the stationary one, in the canonical ordering.

    Eigenvalues degenerate with the leading one (within ``isolation_tol``)
    are skipped, so for a generator with an exactly degenerate null space the
    gap is the first genuinely decaying eigenvalue.
    """
    matrix, _, _ = _resolve(target, charge)
    n = matrix.shape[0]
    if n < 2:
        raise MatrixValidationError("a 1-dimensional sector has no gap eigenvalue")
    result = spectrum(target, charge=charge, count=min(max(count, 2), n), tol=tol, seed=seed)
    lead = result.eigenvalues[0]
    for value in result.eigenvalues[1:]:
        if abs(value - lead) > isolation_tol:
            return complex(value)
    raise ExtractionError(
        f"all {result.eigenvalues.size} computed eigenvalues are degenerate "
        "with the leading one; increase count"
    )


def expectation(state, operator) -> Union[float, complex]:
    """``Tr[O rho]``; real (with asserted small imaginary part) for Hermitian O."""
    rho = state.matrix if isinstance(state, PhysicalState) else as_dense(state)
    op = as_dense(operator)
    if op.shape != rho.shape:
        raise MatrixValidationError(
            f"operator shape {op.shape} does not match state shape {rho.shape}"
        )
    value = complex(np.trace(op @ rho))
    hermitian = float(np.abs(op - op.conj().T).max()) <= 1e-12
    if hermitian:
        if abs(value.imag) > 1e-8:
            raise MatrixValidationError(
                f"expectation of a Hermitian operator has imaginary part {value.imag:.3e}"
            )
        return value.real
    return value


@dataclass
class PropertyReport:
    """Residuals of the structural spectral properties of a generator.

    Keys: ``conjugate_pairing`` (distance between the spectrum and its
    conjugate), ``trace_covector`` (left action of the physical trace),
    ``zero_eigenvalue`` (min ``|lambda|``), ``max_real_part`` and
    ``decaying_trace`` (largest physical-block trace among decaying
    eigenvectors).  The first three hold at every truncation order; the last
    two only asymptotically, so they are reported as diagnostics rather than
    enforced.  ``checked`` records whether each value came from the full
    spectrum or a sampled neighborhood of zero.
    """

    residuals: Dict[str, float] = field(default_factory=dict)
    checked: Dict[str, str] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [
            f"{key} {self.residuals[key]:.17g} {self.checked.get(key, 'full')}"
            for key in sorted(self.residuals)
        ]
        return "\n".join(lines) + "\n"


def _conjugate_pairing_distance(values: np.ndarray) -> float:
    """Largest distance from an eigenvalue to the conjugated multiset.

    Nearest-neighbor matching is robust against floating-point ties that
    break sorted matching; an eigenvalue without a conjugate partner is at
    least its asymmetry away from every conjugated value.
    """
    from scipy.spatial import cKDTree

    points = np.column_stack((values.real, values.imag))
    conj_points = np.column_stack((values.real, -values.imag))
    distances, _ = cKDTree(conj_points).query(points, k=1)
    return float(distances.max())


def check_properties(
    liouvillian: HeomLiouvillian,
    mode: str = "full",
    count: int = 12,
    tol: float = 1e-10,
    seed: int = 0,
) -> PropertyReport:
    """Check the structural spectral properties of an assembled generator.

    ``mode='full'`` diagonalizes densely (dimension permitting);
    ``mode='sampled'`` checks the trace covector exactly but evaluates the
    eigenvalue-based properties on the ``count`` eigenvalues nearest zero.
    """
    if mode not in ("full", "sampled"):
        raise MatrixValidationError("mode must be 'full' or 'sampled'")
    report = PropertyReport()
    report.residuals["trace_covector"] = liouvillian.trace_residual()
    report.checked["trace_covector"] = "full"

    if mode == "full":
        if liouvillian.dim > DENSE_EIG_LIMIT:
            raise SizeBudgetError(
                f"full property check needs a dense-solvable dimension, got {liouvillian.dim}"
            )
        result = spectrum(liouvillian, count=None)
        label = "full"
    else:
        result = spectrum(liouvillian, count=min(count, liouvillian.dim), tol=tol, seed=seed)
        label = "sampled"

    values = result.eigenvalues
    report.residuals["conjugate_pairing"] = _conjugate_pairing_distance(values)
    report.residuals["zero_eigenvalue"] = float(np.abs(values).min())
    report.residuals["max_real_part"] = float(values.real.max())
    w = liouvillian.trace_covector()
    traces = np.abs(np.conj(w) @ result.vectors)
    decaying = np.abs(values.real) > DECAYING_RE_TOL
    report.residuals["decaying_trace"] = (
        float(traces[decaying].max()) if decaying.any() else 0.0
    )
    for key in ("conjugate_pairing", "zero_eigenvalue", "max_real_part", "decaying_trace"):
        report.checked[key] = label
    if mode == "full":
        liouvillian.max_real_part = report.residuals["max_real_part"]
    return report
