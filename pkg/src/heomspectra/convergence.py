"""Truncation-order control for both pictures.

Convergence is measured by differences at consecutive truncations, exactly as
recorded (no Richardson or Cauchy-sequence bounds): for an observable ``O``

    C_k(O)      = | <O>_ss(k) - <O>_ss(k + 1) |

and for a tracked eigenvalue ``S_k = |lambda(k) - lambda(k + 1)|``, with the
eigenvalue matched across truncations by nearest-distance pairing.  The
automatic selectors pick the first truncation where the observable measure
drops below a threshold (default 1e-4).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .builder import assemble
from .embedding import EmbeddingSpec, steady_state_lm
from .errors import MatrixValidationError, PairingError
from .models import ModelInstance
from .spectra import expectation, spectrum, steady_state
from .symmetry import decompose, sector_leading_eigs

#: Default convergence threshold.
DEFAULT_EPSILON = 1e-4
#: Two pairing candidates closer than this are considered ambiguous.
PAIRING_AMBIGUITY_TOL = 1e-12

EigSelector = Callable[[ModelInstance, int], Sequence[complex]]


@dataclass
class ConvergenceTrace:
    """History of a truncation scan and the selected truncation, if any."""

    truncations: List[int]
    measures: List[float]
    target: float
    selected: Optional[int]

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.truncations, self.truncations[1:])):
            raise MatrixValidationError("truncation values must be strictly increasing")
        if any(m < 0 for m in self.measures):
            raise MatrixValidationError("measure values must be non-negative")

    @property
    def exhausted(self) -> bool:
        return self.selected is None


def steady_expectation(
    model: ModelInstance, observable: np.ndarray, k_max: int, **solver_opts
) -> float:
    """Steady-state expectation of a Hermitian observable at one truncation."""
    liouv = assemble(model, k_max)
    state, _ = steady_state(liouv, **solver_opts)
    return float(expectation(state, observable))


def embedding_expectation(
    model: ModelInstance, observable: np.ndarray, n_c: int, **solver_opts
) -> float:
    """Embedding steady-state expectation at one Fock cutoff."""
    spec = EmbeddingSpec(model, (n_c,) * model.mode_count)
    _, reduced = steady_state_lm(spec, **solver_opts)
    return float(expectation(reduced, observable))


def c_measure(
    model: ModelInstance, observable: np.ndarray, k_max: int, **solver_opts
) -> float:
    """Steady-state observable difference between ``k_max`` and ``k_max + 1``."""
    return abs(
        steady_expectation(model, observable, k_max, **solver_opts)
        - steady_expectation(model, observable, k_max + 1, **solver_opts)
    )


def _paired_distance(value: complex, candidates: Sequence[complex]) -> float:
    distances = np.sort(np.abs(np.asarray(candidates, dtype=complex) - value))
    if distances.size == 0:
        raise MatrixValidationError("no candidate eigenvalues at the next truncation")
    if distances.size > 1 and distances[1] - distances[0] < PAIRING_AMBIGUITY_TOL:
        raise PairingError(
            f"two candidates within {PAIRING_AMBIGUITY_TOL:.1e} of the tracked "
            f"eigenvalue {value}; cannot pair across truncations"
        )
    return float(distances[0])


def s_measure(model: ModelInstance, eig_selector: EigSelector, k_max: int) -> float:
    """Distance of the tracked eigenvalue between consecutive truncations.

    ``eig_selector(model, k)`` returns candidate eigenvalues at truncation
    ``k`` with the tracked one first.  The value at ``k_max`` is matched to
    the nearest candidate at ``k_max + 1``; an ambiguous match raises
    :class:`PairingError`.
    """
    tracked = complex(eig_selector(model, k_max)[0])
    candidates = eig_selector(model, k_max + 1)
    return _paired_distance(tracked, candidates)


def gap_selector(count: int = 6, charge: Optional[int] = None) -> EigSelector:
    """Selector tracking the first decaying eigenvalue (the spectral gap).

    With ``charge`` given the model's declared symmetry is used and the gap is
    taken inside that sector; otherwise the full generator is used.
    """

    def select(model: ModelInstance, k_max: int) -> Sequence[complex]:
        liouv = assemble(model, k_max)
        if charge is not None:
            target = decompose(liouv)
            result = spectrum(target, charge=charge, count=count)
        else:
            result = spectrum(liouv, count=count)
        values = result.eigenvalues
        lead = values[0]
        rest = [complex(v) for v in values[1:] if abs(v - lead) > 1e-9]
        if not rest:
            raise MatrixValidationError("no decaying eigenvalue found; increase count")
        return rest

    return select


def broken_sector_selector(count: int = 10) -> EigSelector:
    """Selector tracking the slowest eigenvalue over all non-steady sectors."""

    def select(model: ModelInstance, k_max: int) -> Sequence[complex]:
        liouv = assemble(model, k_max)
        decomp = decompose(liouv)
        leaders: List[Tuple[float, complex]] = []
        for charge in decomp.charges_present():
            if charge == 0:
                continue
            if decomp.spec.group_order == 0 and charge < 0:
                continue  # conjugate partners mirror the positive charges
            dim = decomp.dimension(charge)
            res = sector_leading_eigs(decomp, charge, count=min(count, dim))
            value = complex(res.eigenvalues[0])
            leaders.append((abs(value.real), value))
        if not leaders:
            raise MatrixValidationError("the decomposition has no non-steady sector")
        leaders.sort(key=lambda item: item[0])
        return [value for _, value in leaders]

    return select


def auto_truncate(
    model: ModelInstance,
    observable: np.ndarray,
    epsilon: float = DEFAULT_EPSILON,
    k_start: int = 1,
    k_limit: int = 12,
    **solver_opts,
) -> ConvergenceTrace:
    """Smallest ``k_max`` in ``[k_start, k_limit]`` with ``C < epsilon``.

    Exhaustion of the range is a value (``selected is None``), not an error.
    """
    if epsilon <= 0:
        raise MatrixValidationError("epsilon must be > 0")
    if k_start < 0 or k_limit < k_start:
        raise MatrixValidationError("need k_start >= 0 and k_limit >= k_start")
    truncations: List[int] = []
    measures: List[float] = []
    previous = steady_expectation(model, observable, k_start, **solver_opts)
    selected = None
    for k in range(k_start, k_limit + 1):
        current = steady_expectation(model, observable, k + 1, **solver_opts)
        value = abs(previous - current)
        truncations.append(k)
        measures.append(value)
        if value < epsilon:
            selected = k
            break
        previous = current
    return ConvergenceTrace(truncations, measures, epsilon, selected)


def auto_cutoff(
    model: ModelInstance,
    observable: np.ndarray,
    epsilon: float = DEFAULT_EPSILON,
    n_start: int = 1,
    n_limit: int = 16,
    **solver_opts,
) -> ConvergenceTrace:
    """Mirror of :func:`auto_truncate` for the embedding Fock cutoff."""
    if epsilon <= 0:
        raise MatrixValidationError("epsilon must be > 0")
    if n_start < 1 or n_limit < n_start:
        raise MatrixValidationError("need n_start >= 1 and n_limit >= n_start")
    truncations: List[int] = []
    measures: List[float] = []
    previous = embedding_expectation(model, observable, n_start, **solver_opts)
    selected = None
    for n in range(n_start, n_limit + 1):
        current = embedding_expectation(model, observable, n + 1, **solver_opts)
        value = abs(previous - current)
        truncations.append(n)
        measures.append(value)
        if value < epsilon:
            selected = n
            break
        previous = current
    return ConvergenceTrace(truncations, measures, epsilon, selected)
