"""Collective spin operators on the symmetric subspace and qubit operators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict

import numpy as np

from .errors import MatrixValidationError


@dataclass(frozen=True)
class SpinSpace:
    """Symmetric subspace of ``n_particles`` spin-1/2 particles.

    The basis is ordered by ascending magnetic quantum number
    ``m = -j, ..., +j`` with ``j = n_particles / 2``, so the ground state of
    ``Sz`` comes first.  All operators built from this space, and every file
    written by the package, inherit this ordering.
    """

    n_particles: int

    def __post_init__(self):
        if self.n_particles < 1:
            raise MatrixValidationError("n_particles must be >= 1")

    @property
    def j(self) -> float:
        return self.n_particles / 2

    @property
    def dim(self) -> int:
        return self.n_particles + 1


def spin_operators(space: SpinSpace) -> Dict[str, np.ndarray]:
    """Collective spin matrices ``Sz, Sp, Sm, Sx, Sy`` on a :class:`SpinSpace`.

    ``Sp`` links ``m -> m + 1`` with amplitude ``sqrt(j(j+1) - m(m+1))``;
    ``Sm = Sp.conj().T``.
    """
    j = space.j
    d = space.dim
    m = np.arange(d) - j
    sz = np.diag(m).astype(complex)
    ladder = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    sp_ = np.zeros((d, d), dtype=complex)
    sp_[np.arange(1, d), np.arange(d - 1)] = ladder
    sm = sp_.conj().T.copy()
    sx = (sp_ + sm) / 2
    sy = (sp_ - sm) / 2j
    return {"Sz": sz, "Sp": sp_, "Sm": sm, "Sx": sx, "Sy": sy}


def qubit_operators() -> Dict[str, np.ndarray]:
    """Pauli matrices and the lowering operator for a single qubit.

    Basis ordering: index 0 is the ground state, index 1 the excited state,
    matching the ascending-``m`` spin convention.  Hence ``sigma_z`` is
    ``diag(-1, +1)`` and ``sigma_minus = |0><1|`` maps excited to ground.
    """
    return {
        "sigma_x": np.array([[0, 1], [1, 0]], dtype=complex),
        "sigma_y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "sigma_z": np.array([[-1, 0], [0, 1]], dtype=complex),
        "sigma_minus": np.array([[0, 1], [0, 0]], dtype=complex),
    }
