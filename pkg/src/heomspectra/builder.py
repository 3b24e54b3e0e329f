"""Assembly of the sparse hierarchy generator and state propagation.

The generator acts on a stacked vector holding the row-major vectorization of
every retained auxiliary matrix, ordered by the lexicographic enumeration of
:mod:`heomspectra.hierarchy`.  For each index ``(n, m)`` the diagonal block is

    -1j * (H (x) 1 - 1 (x) H^T) - sum_p [ (n_p - m_p) 1j w_p.imag
                                          + (n_p + m_p) w_p.real ] * 1,

with ``w_p = kappa_p + 1j * omega_p`` per damped mode, and the couplings are

    from (n - e_p, m):  n_p * G_p * (L (x) 1)
    from (n, m - e_p):  m_p * conj(G_p) * (1 (x) conj(L))
    from (n + e_p, m):  1 (x) conj(L) - L^dag (x) 1
    from (n, m + e_p):  L (x) 1 - 1 (x) L^T

Couplings that leave the triangular cut are dropped (truncation closure).
Assembly accumulates triplets and canonicalizes at the end, so the matrix is
deterministic regardless of traversal order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .errors import MatrixValidationError, SizeBudgetError, StiffnessError
from .hierarchy import HierarchySpace, enumerate_indices
from .linalg import clean_sparse, devectorize, kron, vectorize, write_triplets
from .models import ModelInstance

#: Largest stacked dimension assemble() will build by default.
DEFAULT_DIMENSION_BUDGET = 2_000_000


@dataclass
class HeomLiouvillian:
    """Sparse generator of the full hierarchy dynamics plus its metadata.

    ``mode_decays[p] = kappa_p + 1j * omega_p`` per damped mode, in the order
    of ``model.slots()``.  ``max_real_part`` is a diagnostic filled in when a
    full spectrum has been computed; at finite truncation small positive real
    parts are expected and are not an error.
    """

    matrix: sp.csr_matrix
    hierarchy: HierarchySpace
    d_s: int
    model: ModelInstance
    mode_decays: np.ndarray
    max_real_part: Optional[float] = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace_covector(self) -> np.ndarray:
        """Vector ``w`` with ``w^dag |rho>`` = trace of the physical block."""
        w = np.zeros(self.dim, dtype=complex)
        w[: self.d_s * self.d_s] = vectorize(np.eye(self.d_s))
        return w

    def trace_residual(self) -> float:
        """Norm of the physical-trace covector acting from the left."""
        w = self.trace_covector()
        return float(np.linalg.norm(self.matrix.T @ np.conj(w)))

    def block_count(self) -> int:
        """Number of nonzero blocks in the block-sparsity pattern."""
        coo = self.matrix.tocoo()
        d2 = self.d_s * self.d_s
        pairs = set(zip((coo.row // d2).tolist(), (coo.col // d2).tolist()))
        return len(pairs)


class HeomState:
    """Stacked state vector with access to individual auxiliary blocks."""

    def __init__(self, vector: np.ndarray, hierarchy: HierarchySpace, d_s: int):
        vector = np.asarray(vector, dtype=complex).ravel()
        expected = len(hierarchy) * d_s * d_s
        if vector.size != expected:
            raise MatrixValidationError(
                f"state vector length {vector.size} does not match the "
                f"hierarchy dimension {expected}"
            )
        self.vector = vector
        self.hierarchy = hierarchy
        self.d_s = d_s

    def block_by_rank(self, rank: int) -> np.ndarray:
        d2 = self.d_s * self.d_s
        return devectorize(self.vector[rank * d2 : (rank + 1) * d2], self.d_s)

    def block(self, n: Sequence[int], m: Sequence[int]) -> np.ndarray:
        rank = self.hierarchy.rank(tuple(n) + tuple(m))
        return self.block_by_rank(rank)

    def physical(self) -> np.ndarray:
        """The block at the all-zero index."""
        return self.block_by_rank(0)


@dataclass(frozen=True)
class BlockTemplates:
    """Vectorized building blocks for one damped mode of one bath.

    ``drift`` builds the full diagonal block for a given ``(n, m)`` (it sums
    the damping of every mode, not just this one); the remaining entries are
    the couplings listed in the module docstring.
    """

    drift: Callable[[Sequence[int], Sequence[int]], sp.csr_matrix]
    lower_n: Callable[[int], sp.csr_matrix]
    lower_m: Callable[[int], sp.csr_matrix]
    raise_n: sp.csr_matrix = field(repr=False)
    raise_m: sp.csr_matrix = field(repr=False)


def _mode_decays(model: ModelInstance) -> np.ndarray:
    return np.array(
        [term.decay + 1j * term.frequency for _, term in model.slots()],
        dtype=complex,
    )


def _drift_builder(model: ModelInstance):
    d = model.dim
    identity = sp.identity(d, dtype=complex, format="csr")
    h = model.hamiltonian
    h_part = clean_sparse(
        -1j * (kron(h, identity) - kron(identity, h.T)), prune_tol=0.0
    )
    w = _mode_decays(model)
    eye_d2 = sp.identity(d * d, dtype=complex, format="csr")

    def drift(n: Sequence[int], m: Sequence[int]) -> sp.csr_matrix:
        n = np.asarray(n)
        m = np.asarray(m)
        damping = np.sum((n - m) * 1j * w.imag + (n + m) * w.real)
        return (h_part - damping * eye_d2).tocsr()

    return drift


def block_templates(model: ModelInstance, slot: int) -> BlockTemplates:
    """Templates for one flat mode index (see ``model.slots()`` for the order)."""
    slots = model.slots()
    if not 0 <= slot < len(slots):
        raise MatrixValidationError(f"slot {slot} out of range")
    bath_index, term = slots[slot]
    coupling = model.baths[bath_index].coupling
    d = model.dim
    identity = sp.identity(d, dtype=complex, format="csr")
    left = kron(coupling, identity)
    right_conj = kron(identity, coupling.conj())
    lower_n_base = term.amplitude * left
    lower_m_base = np.conj(term.amplitude) * right_conj
    raise_n = (right_conj - kron(coupling.conj().T, identity)).tocsr()
    raise_m = (left - kron(identity, coupling.T)).tocsr()

    return BlockTemplates(
        drift=_drift_builder(model),
        lower_n=lambda n: clean_sparse(n * lower_n_base),
        lower_m=lambda m: clean_sparse(m * lower_m_base),
        raise_n=raise_n,
        raise_m=raise_m,
    )


def assemble(
    model: ModelInstance,
    k_max: int,
    dimension_budget: int = DEFAULT_DIMENSION_BUDGET,
) -> HeomLiouvillian:
    """Assemble the sparse generator for a model at truncation order ``k_max``."""
    n_modes = model.mode_count
    space = enumerate_indices(n_modes, k_max)
    d = model.dim
    d2 = d * d
    dim = len(space) * d2
    if dim > dimension_budget:
        raise SizeBudgetError(
            f"stacked dimension {dim} exceeds the budget {dimension_budget}"
        )

    identity = sp.identity(d, dtype=complex, format="csr")
    h = model.hamiltonian
    h_part = (-1j * (kron(h, identity) - kron(identity, h.T))).tocoo()
    w = _mode_decays(model)

    slot_templates = []
    for p, (bath_index, term) in enumerate(model.slots()):
        coupling = model.baths[bath_index].coupling
        left = kron(coupling, identity)
        right_conj = kron(identity, coupling.conj())
        slot_templates.append(
            (
                (term.amplitude * left).tocoo(),                      # lower_n / n_p
                (np.conj(term.amplitude) * right_conj).tocoo(),       # lower_m / m_p
                (right_conj - kron(coupling.conj().T, identity)).tocoo(),
                (left - kron(identity, coupling.T)).tocoo(),
            )
        )

    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    data: List[np.ndarray] = []
    diag_positions = np.arange(d2, dtype=np.int64)

    def place(template: sp.coo_matrix, block_row: int, block_col: int, scale=1.0):
        if template.nnz == 0 or scale == 0:
            return
        rows.append(template.row.astype(np.int64) + block_row * d2)
        cols.append(template.col.astype(np.int64) + block_col * d2)
        data.append(template.data * scale)

    indices = np.asarray(space.indices, dtype=np.int64)
    n_parts = indices[:, :n_modes]
    m_parts = indices[:, n_modes:]
    dampings = (n_parts - m_parts) @ (1j * w.imag) + (n_parts + m_parts) @ w.real

    for rank, index in enumerate(space.indices):
        place(h_part, rank, rank)
        if dampings[rank] != 0:
            rows.append(diag_positions + rank * d2)
            cols.append(diag_positions + rank * d2)
            data.append(np.full(d2, -dampings[rank], dtype=complex))
        for p, (lower_n, lower_m, raise_n, raise_m) in enumerate(slot_templates):
            n_val = index[p]
            m_val = index[n_modes + p]
            if n_val:
                source = space.neighbor(index, p, "n", -1)
                place(lower_n, rank, source, scale=n_val)
            if m_val:
                source = space.neighbor(index, p, "m", -1)
                place(lower_m, rank, source, scale=m_val)
            source = space.neighbor(index, p, "n", +1)
            if source is not None:
                place(raise_n, rank, source)
            source = space.neighbor(index, p, "m", +1)
            if source is not None:
                place(raise_m, rank, source)

    if rows:
        matrix = sp.coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim),
        )
    else:
        matrix = sp.coo_matrix((dim, dim), dtype=complex)
    return HeomLiouvillian(
        matrix=clean_sparse(matrix),
        hierarchy=space,
        d_s=d,
        model=model,
        mode_decays=w,
    )


def initial_state(rho_s: np.ndarray, hierarchy: HierarchySpace) -> HeomState:
    """Stacked state with the physical block set to ``rho_s`` and zeros elsewhere."""
    rho = np.asarray(rho_s, dtype=complex)
    defect = float(np.abs(rho - rho.conj().T).max())
    if defect > 1e-10:
        raise MatrixValidationError(f"initial state not Hermitian (defect {defect:.3e})")
    trace = complex(np.trace(rho))
    if abs(trace - 1.0) > 1e-10:
        raise MatrixValidationError(f"initial state trace {trace} is not 1")
    min_eig = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())
    if min_eig < -1e-10:
        raise MatrixValidationError(f"initial state has negative eigenvalue {min_eig:.3e}")
    d = rho.shape[0]
    vector = np.zeros(len(hierarchy) * d * d, dtype=complex)
    vector[: d * d] = vectorize(rho)
    return HeomState(vector, hierarchy, d)


def propagate(
    liouvillian: HeomLiouvillian,
    state0: HeomState,
    t_grid: Sequence[float],
    rtol: float = 1e-9,
    atol: float = 1e-11,
) -> List[HeomState]:
    """Solve the linear hierarchy dynamics on an ascending time grid from 0."""
    t = np.asarray(t_grid, dtype=float)
    if t.size == 0 or abs(t[0]) > 0:
        raise MatrixValidationError("t_grid must start at 0")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise MatrixValidationError("t_grid must be strictly ascending")
    if state0.vector.size != liouvillian.dim:
        raise MatrixValidationError("state dimension does not match the generator")
    if t.size == 1:
        return [HeomState(state0.vector.copy(), liouvillian.hierarchy, liouvillian.d_s)]

    matrix = liouvillian.matrix

    solution = solve_ivp(
        lambda _, y: matrix @ y,
        (0.0, float(t[-1])),
        state0.vector,
        method="DOP853",
        t_eval=t,
        rtol=rtol,
        atol=atol,
    )
    if not solution.success:
        raise StiffnessError(
            "adaptive integration failed (likely stiffness); consider spectral "
            f"propagation through the eigendecomposition: {solution.message}"
        )
    return [
        HeomState(solution.y[:, i], liouvillian.hierarchy, liouvillian.d_s)
        for i in range(solution.y.shape[1])
    ]


def adjoint_state(state: HeomState) -> HeomState:
    """Swap the ``(n, m)`` and ``(m, n)`` blocks and conjugate-transpose each.

    The generator commutes with this involution, which is what makes its
    spectrum symmetric about the real axis.
    """
    space = state.hierarchy
    out = np.empty_like(state.vector)
    d2 = state.d_s * state.d_s
    for rank, index in enumerate(space.indices):
        target = space.rank(space.swapped(index))
        block = state.block_by_rank(rank).conj().T
        out[target * d2 : (target + 1) * d2] = block.ravel()
    return HeomState(out, space, state.d_s)


def export_matrix(liouvillian: HeomLiouvillian, path) -> None:
    """Write the assembled matrix in the text triplet format."""
    write_triplets(liouvillian.matrix, path)
