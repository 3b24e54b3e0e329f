"""Weak symmetries as integer charge assignments and sector decomposition.

A weak symmetry generated by an operator that is diagonal in the system basis
is declared by an integer charge per system basis state plus an integer charge
per bath (the coefficient of that bath's mode-number operator in the
generator).  In that case the superoperator eigenbasis is the computational
basis and the sector decomposition is exact index bookkeeping: the basis
element ``|i><j|`` inside hierarchy index ``(n, m)`` carries the charge

    q[i] - q[j] + sum_p  c[bath(p)] * (n[p] - m[p]),

reduced modulo ``group_order`` for finite groups.  The sign convention for the
bath charges is fixed by requiring block-diagonality of the assembled
generator; :func:`decompose` raises if the declared charges are wrong.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, List, Sequence, Tuple

import numpy as np

from .errors import MatrixValidationError, SingularShiftError, SymmetryViolationError
from .linalg import EigResult, eig_targeted

if TYPE_CHECKING:  # pragma: no cover
    from .builder import HeomLiouvillian

#: Largest tolerated magnitude of an entry connecting different charges.
OFF_SECTOR_TOL = 1e-12


@dataclass(frozen=True)
class SymmetrySpec:
    """Charge assignment declaring a weak symmetry.

    ``group_order = 0`` declares a continuous U(1) charge; a positive order
    reduces charges modulo that order.  Only charge differences enter the
    sector labels, so any common offset of ``system_charges`` is irrelevant.
    """

    system_charges: Tuple[int, ...]
    bath_charges: Tuple[int, ...]
    group_order: int = 0

    def __post_init__(self):
        if self.group_order < 0:
            raise MatrixValidationError("group_order must be >= 0")
        object.__setattr__(self, "system_charges", tuple(int(q) for q in self.system_charges))
        object.__setattr__(self, "bath_charges", tuple(int(c) for c in self.bath_charges))

    def reduce(self, charge: int) -> int:
        return charge % self.group_order if self.group_order else charge


def basis_charge(
    spec: SymmetrySpec,
    pair: Tuple[int, int],
    index: Sequence[int],
    slot_baths: Sequence[int],
) -> int:
    """Charge of the basis element ``|i><j|`` at hierarchy index ``(n, m)``.

    ``slot_baths[p]`` names the bath that mode ``p`` belongs to; ``index`` is
    the flat ``(n, m)`` tuple of length ``2 * len(slot_baths)``.
    """
    i, j = pair
    q = spec.system_charges
    charge = q[i] - q[j]
    n_modes = len(slot_baths)
    for p, bath in enumerate(slot_baths):
        charge += spec.bath_charges[bath] * (index[p] - index[n_modes + p])
    return spec.reduce(charge)


def validate_model_charges(spec: SymmetrySpec, model) -> float:
    """Largest matrix element violating the declared charge pattern.

    The Hamiltonian must connect equal system charges and each coupling
    operator ``L_l`` must shift the system charge by exactly
    ``-bath_charges[l]`` (mod the group order).  Returns the worst violating
    magnitude, 0.0 when the assignment is consistent.
    """
    q = np.asarray(spec.system_charges)
    d = model.dim
    if q.size != d:
        raise MatrixValidationError(
            f"{q.size} system charges for a dimension-{d} model"
        )
    if len(spec.bath_charges) != len(model.baths):
        raise MatrixValidationError(
            f"{len(spec.bath_charges)} bath charges for {len(model.baths)} baths"
        )
    diff = q[:, None] - q[None, :]
    worst = 0.0

    def _reduced(x):
        return np.mod(x, spec.group_order) if spec.group_order else x

    bad = _reduced(diff) != 0
    if bad.any():
        worst = max(worst, float(np.abs(model.hamiltonian[bad]).max()))
    for charge, bath in zip(spec.bath_charges, model.baths):
        bad = _reduced(diff + charge) != 0
        if bad.any():
            worst = max(worst, float(np.abs(bath.coupling[bad]).max()))
    return worst


@dataclass
class SectorDecomposition:
    """Partition of the vectorized basis by charge, with per-sector matrices.

    ``sectors`` maps each charge to the sorted global basis ranks it owns and
    ``matrices`` holds the corresponding submatrices.  The sector of charge 0
    contains the physical trace covector and hence the steady state.
    """

    liouvillian: "HeomLiouvillian"
    spec: SymmetrySpec
    charges: np.ndarray
    sectors: Dict[int, np.ndarray]
    matrices: Dict[int, "np.ndarray"]
    off_sector_residual: float
    steady_sector_residual: float

    def charges_present(self) -> List[int]:
        return sorted(self.sectors)

    def dimension(self, charge: int) -> int:
        return len(self.sectors[charge])

    def sector(self, charge: int):
        if charge not in self.matrices:
            raise MatrixValidationError(f"sector {charge} does not exist")
        return self.matrices[charge]

    def embed(self, charge: int, local: np.ndarray) -> np.ndarray:
        """Scatter a sector-local vector back into full-space coordinates."""
        full = np.zeros(self.liouvillian.dim, dtype=complex)
        full[self.sectors[charge]] = local
        return full


def decompose(liouvillian: "HeomLiouvillian", spec: SymmetrySpec | None = None) -> SectorDecomposition:
    """Split the generator into charge sectors, verifying block-diagonality.

    Every nonzero entry must connect equal charges; the worst off-sector
    entry above :data:`OFF_SECTOR_TOL` raises :class:`SymmetryViolationError`,
    which signals a wrong :class:`SymmetrySpec` rather than a numerical issue.
    """
    if spec is None:
        spec = liouvillian.model.symmetry
    if spec is None:
        raise MatrixValidationError("model declares no symmetry and none was given")
    space = liouvillian.hierarchy
    d = liouvillian.d_s
    slot_baths = [bath_index for bath_index, _ in liouvillian.model.slots()]
    q = np.asarray(spec.system_charges, dtype=np.int64)
    if q.size != d:
        raise MatrixValidationError(f"{q.size} system charges for block size {d}")
    pair_charge = (q[:, None] - q[None, :]).ravel()

    bath_c = np.asarray(spec.bath_charges, dtype=np.int64)[slot_baths]
    idx = np.asarray(space.indices, dtype=np.int64)
    mode_charge = (idx[:, : space.n_modes] - idx[:, space.n_modes :]) @ bath_c

    charges = (mode_charge[:, None] + pair_charge[None, :]).ravel()
    if spec.group_order:
        charges = np.mod(charges, spec.group_order)

    matrix = liouvillian.matrix.tocoo()
    bad = charges[matrix.row] != charges[matrix.col]
    if bad.any():
        values = np.abs(matrix.data[bad])
        worst = int(np.argmax(values))
        if values[worst] > OFF_SECTOR_TOL:
            rows = matrix.row[bad]
            cols = matrix.col[bad]
            raise SymmetryViolationError(
                float(values[worst]),
                int(rows[worst]),
                int(cols[worst]),
                int(charges[rows[worst]]),
                int(charges[cols[worst]]),
            )
        off_residual = float(values[worst])
    else:
        off_residual = 0.0

    csr = liouvillian.matrix.tocsr()
    sectors: Dict[int, np.ndarray] = {}
    matrices = {}
    for charge in np.unique(charges):
        members = np.flatnonzero(charges == charge)
        sectors[int(charge)] = members
        matrices[int(charge)] = csr[members, :][:, members]

    if 0 not in sectors:
        raise SymmetryViolationError(0.0, 0, 0, 0, 0)
    # The physical trace covector lives entirely in the charge-0 sector, so a
    # left-null residual there certifies that sector hosts the 0 eigenvalue.
    trace_vec = liouvillian.trace_covector()[sectors[0]]
    steady_residual = float(
        np.linalg.norm(matrices[0].T @ np.conj(trace_vec))
    )
    return SectorDecomposition(
        liouvillian=liouvillian,
        spec=spec,
        charges=charges,
        sectors=sectors,
        matrices=matrices,
        off_sector_residual=off_residual,
        steady_sector_residual=steady_residual,
    )


def leading_order(values: np.ndarray) -> np.ndarray:
    """Ordering by ascending ``|Re|``, then ``|Im|``, non-negative ``Im`` first."""
    return np.lexsort((values.imag < 0, np.abs(values.imag), np.abs(values.real)))


def sector_leading_eigs(
    decomp: SectorDecomposition,
    charge: int,
    count: int,
    tol: float = 1e-10,
    seed: int = 0,
) -> EigResult:
    """The ``count`` eigenvalues of one sector nearest zero, gap-ordered.

    Ordering is ascending ``|Re|`` with ties broken by ascending ``|Im|`` and
    then by the sign of the imaginary part (non-negative first).
    """
    matrix = decomp.sector(charge)
    try:
        res = eig_targeted(matrix, 0.0, count, tol=tol, seed=seed)
    except SingularShiftError as exc:
        res = eig_targeted(matrix, exc.suggested_shift, count, tol=tol, seed=seed)
    order = leading_order(res.eigenvalues)
    return EigResult(
        eigenvalues=res.eigenvalues[order],
        right_vectors=res.right_vectors[:, order],
        residual_norms=res.residual_norms[order],
        vector_condition=res.vector_condition,
    )
