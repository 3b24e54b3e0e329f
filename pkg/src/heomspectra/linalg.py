"""Dense and sparse complex linear algebra primitives.

Conventions
-----------
Vectorization is row major: entry ``rho[i, j]`` of a ``rows x cols`` matrix
lands at position ``i * cols + j``.  Under this convention left/right
multiplication vectorizes as ``vec(A @ rho @ B) = kron(A, B.T) @ vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    EigenConvergenceError,
    MatrixValidationError,
    NotPositiveSemidefiniteError,
    SingularShiftError,
    SizeBudgetError,
)

MatrixLike = Union[np.ndarray, sp.spmatrix]

#: Largest dimension accepted by the full dense eigensolver.
DENSE_EIG_LIMIT = 6000
#: Below this dimension targeted solves fall back to the dense solver.
TARGETED_DENSE_FALLBACK = 600
#: Explicit zeros below this magnitude are purged from sparse matrices.
SPARSE_PRUNE_TOL = 1e-15
#: Condition computation for eigenvector matrices is skipped above this size.
_CONDITION_LIMIT = 2000


def as_dense(a: MatrixLike) -> np.ndarray:
    """Return ``a`` as a 2d complex array, rejecting NaN/Inf entries."""
    if sp.issparse(a):
        a = a.toarray()
    out = np.asarray(a, dtype=complex)
    if out.ndim != 2:
        raise MatrixValidationError(f"expected a 2d matrix, got shape {out.shape}")
    if not np.all(np.isfinite(out.real)) or not np.all(np.isfinite(out.imag)):
        raise MatrixValidationError("matrix contains NaN or Inf entries")
    return out


def clean_sparse(a: MatrixLike, prune_tol: float = SPARSE_PRUNE_TOL) -> sp.csr_matrix:
    """Canonicalize to CSR: sum duplicates, purge tiny entries, sort indices."""
    m = sp.csr_matrix(a, dtype=complex)
    m.sum_duplicates()
    if m.nnz:
        mask = np.abs(m.data) < prune_tol
        if mask.any():
            m.data[mask] = 0.0
            m.eliminate_zeros()
    m.sort_indices()
    return m


def kron(a: MatrixLike, b: MatrixLike) -> sp.csr_matrix:
    """Kronecker product returned as canonical CSR."""
    ra, ca = a.shape
    rb, cb = b.shape
    if ra * rb > np.iinfo(np.int64).max or ca * cb > np.iinfo(np.int64).max:
        raise SizeBudgetError("Kronecker product exceeds the index range")
    return clean_sparse(sp.kron(sp.csr_matrix(a, dtype=complex),
                                sp.csr_matrix(b, dtype=complex), format="csr"))


def vectorize(rho: MatrixLike) -> np.ndarray:
    """Row-major vectorization of a matrix."""
    return as_dense(rho).ravel(order="C")


def devectorize(v: np.ndarray, rows: int, cols: Optional[int] = None) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    cols = rows if cols is None else cols
    v = np.asarray(v, dtype=complex).ravel()
    if v.size != rows * cols:
        raise MatrixValidationError(
            f"vector of length {v.size} cannot fill a {rows}x{cols} matrix"
        )
    return v.reshape(rows, cols).copy()


@dataclass
class EigResult:
    """Eigenvalues with unit-norm right (and optionally left) eigenvectors.

    ``residual_norms[i]`` is ``||A v_i - lambda_i v_i||_2``.
    ``vector_condition`` is the 2-norm condition number of the eigenvector
    matrix; large values flag near-parallel eigenvectors (defective input).
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    residual_norms: np.ndarray
    left_vectors: Optional[np.ndarray] = None
    vector_condition: Optional[float] = None


def _normalize_columns(v: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(v, axis=0)
    norms[norms == 0] = 1.0
    return v / norms


def _residuals(a: MatrixLike, values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    return np.linalg.norm(a @ vectors - vectors * values, axis=0)


def eig_dense(a: MatrixLike, want_left: bool = False) -> EigResult:
    """Full spectrum of a square matrix with normalized eigenvectors."""
    m = as_dense(a)
    n, nc = m.shape
    if n != nc:
        raise MatrixValidationError("eig_dense requires a square matrix")
    if n > DENSE_EIG_LIMIT:
        raise SizeBudgetError(
            f"dimension {n} exceeds the dense eigensolver limit {DENSE_EIG_LIMIT}"
        )
    try:
        if want_left:
            values, left, right = sla.eig(m, left=True, right=True)
        else:
            values, right = sla.eig(m)
            left = None
    except sla.LinAlgError as exc:  # pragma: no cover - LAPACK failure path
        raise EigenConvergenceError(f"dense eigensolver failed: {exc}") from exc
    right = _normalize_columns(right)
    if left is not None:
        left = _normalize_columns(left)
    condition = None
    if n <= _CONDITION_LIMIT:
        condition = float(np.linalg.cond(right))
    return EigResult(
        eigenvalues=values,
        right_vectors=right,
        residual_norms=_residuals(m, values, right),
        left_vectors=left,
        vector_condition=condition,
    )


def _nearest_order(values: np.ndarray, shift: complex) -> np.ndarray:
    """Deterministic ordering by distance to ``shift``."""
    return np.lexsort((values.imag, values.real, np.abs(values - shift)))


def eig_targeted(
    a: MatrixLike,
    shift: complex,
    count: int,
    tol: float = 1e-10,
    dense_fallback: Optional[int] = None,
    seed: int = 0,
) -> EigResult:
    """The ``count`` eigenvalues nearest ``shift`` of a sparse square matrix.

    Uses shift-invert Arnoldi iteration with a sparse LU factorization; below
    ``dense_fallback`` (or whenever the Krylov solver cannot be used) the full
    dense spectrum is computed and filtered instead.  Residual norms are
    checked against ``tol``.

    Raises
    ------
    SingularShiftError
        If the factorization of ``A - shift`` is singular; the error carries a
        suggested perturbed shift.
    EigenConvergenceError
        If the iteration fails or residuals exceed ``tol``.
    """
    if count < 1:
        raise MatrixValidationError("count must be >= 1")
    if tol <= 0:
        raise MatrixValidationError("tol must be > 0")
    m = clean_sparse(a) if not sp.issparse(a) else a.tocsr()
    n, nc = m.shape
    if n != nc:
        raise MatrixValidationError("eig_targeted requires a square matrix")
    if count > n:
        raise MatrixValidationError(f"cannot request {count} eigenvalues of a {n}x{n} matrix")
    limit = TARGETED_DENSE_FALLBACK if dense_fallback is None else dense_fallback
    if n <= limit or count > n - 2:
        full = eig_dense(m.toarray())
        order = _nearest_order(full.eigenvalues, shift)[:count]
        values = full.eigenvalues[order]
        vectors = full.right_vectors[:, order]
        return EigResult(
            eigenvalues=values,
            right_vectors=vectors,
            residual_norms=full.residual_norms[order],
            vector_condition=float(np.linalg.cond(vectors)) if count > 1 else 1.0,
        )

    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    ask = min(count + 4, n - 2)
    ncv = min(n, max(2 * ask + 12, 36))
    csc = m.tocsc()
    scale = float(np.abs(m.data).max()) if m.nnz else 1.0

    # A shift sitting exactly on an eigenvalue (the usual case when targeting
    # the stationary state at 0) poisons the factorization and yields spurious
    # Ritz pairs, so a slightly displaced shift is tried first; the
    # eigenvalues nearest the *requested* shift are then selected from the
    # larger Ritz set, so the displacement does not change the result.
    attempts = [shift - 1e-3 * scale, shift, shift - 1e-2 * scale * (1 + 0.1j)]
    failures = []
    singular = None
    ritz = None
    for attempt in attempts:
        try:
            values, vectors = spla.eigs(
                csc,
                k=ask,
                sigma=attempt,
                which="LM",
                tol=min(tol, 1e-10) * 1e-2,
                v0=v0,
                ncv=ncv,
                maxiter=max(100, 60 * ask),
            )
        except RuntimeError as exc:
            if "singular" in str(exc).lower():
                singular = exc
                failures.append(f"sigma={attempt}: singular factorization")
                continue
            raise EigenConvergenceError(f"shift-invert iteration failed: {exc}") from exc
        except spla.ArpackNoConvergence as exc:
            failures.append(f"sigma={attempt}: no convergence")
            ritz = exc.eigenvalues
            continue

        vectors = _normalize_columns(vectors)
        order = _nearest_order(values, shift)[:count]
        values = values[order]
        vectors = vectors[:, order]
        residuals = _residuals(m, values, vectors)
        if np.all(residuals <= tol):
            condition = float(np.linalg.cond(vectors)) if count > 1 else 1.0
            return EigResult(
                eigenvalues=values,
                right_vectors=vectors,
                residual_norms=residuals,
                vector_condition=condition,
            )
        failures.append(f"sigma={attempt}: residuals up to {residuals.max():.3e}")
        ritz = values

    if singular is not None and ritz is None:
        step = max(1e-12, 1e-9 * scale)
        raise SingularShiftError(shift, shift + step) from singular
    raise EigenConvergenceError(
        "targeted eigensolve failed to reach tol "
        f"{tol:.1e}: {'; '.join(failures)}",
        ritz_values=ritz,
    )


def herm_sqrt(a: MatrixLike, clip_tol: float = 1e-12) -> np.ndarray:
    """Hermitian PSD square root with clipping of tiny negative eigenvalues."""
    m = as_dense(a)
    defect = float(np.abs(m - m.conj().T).max()) if m.size else 0.0
    if defect > 1e-10:
        raise MatrixValidationError(
            f"herm_sqrt requires a Hermitian matrix; defect {defect:.3e}"
        )
    h = (m + m.conj().T) / 2
    w, u = np.linalg.eigh(h)
    if w.size and w.min() < -clip_tol:
        raise NotPositiveSemidefiniteError(float(w.min()), clip_tol)
    w = np.clip(w, 0.0, None)
    s = (u * np.sqrt(w)) @ u.conj().T
    return (s + s.conj().T) / 2


def write_triplets(a: MatrixLike, path) -> None:
    """Write a sparse matrix as text: ``rows cols nnz`` then ``row col re im``."""
    m = clean_sparse(a).tocoo()
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{m.shape[0]} {m.shape[1]} {m.nnz}\n")
        for r, c, v in zip(m.row, m.col, m.data):
            fh.write(f"{r} {c} {v.real:.17g} {v.imag:.17g}\n")


def read_triplets(path) -> sp.csr_matrix:
    """Read a matrix written by :func:`write_triplets`."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise MatrixValidationError(f"{path}: malformed triplet header")
        rows, cols, nnz = (int(x) for x in header)
        r = np.empty(nnz, dtype=np.int64)
        c = np.empty(nnz, dtype=np.int64)
        data = np.empty(nnz, dtype=complex)
        for i in range(nnz):
            parts = fh.readline().split()
            if len(parts) != 4:
                raise MatrixValidationError(f"{path}: malformed triplet line {i + 2}")
            r[i] = int(parts[0])
            c[i] = int(parts[1])
            data[i] = float(parts[2]) + 1j * float(parts[3])
    if nnz and (r.min() < 0 or r.max() >= rows or c.min() < 0 or c.max() >= cols):
        raise MatrixValidationError(f"{path}: triplet indices out of range")
    return clean_sparse(sp.coo_matrix((data, (r, c)), shape=(rows, cols)))
