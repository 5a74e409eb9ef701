"""Concurrence-based entanglement measures for qubit registers."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .cascade import (CoefficientTensor, DensityMatrix, density_matrix,
                      partial_trace, purity)
from .errors import (MixedState, NullState, NumericalBreakdown, UnknownLabel,
                     WrongDimension)

SIGMA_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))

_CLIP_EIG = 1e-8
_CLIP_VALUE = 1e-10
_PURE_TOL = 1e-10


@dataclass(frozen=True)
class ConcurrenceReport:
    """One concurrence value.

    ``labels`` holds two labels for a qubit pair, or two label groups for a
    bipartition.  ``spectrum`` is the descending Wootters lambdas for a pair
    and ``(purity of side A,)`` for a bipartition.
    """

    labels: tuple
    value: float
    spectrum: tuple[float, ...]
    kind: str = "pair"

    @property
    def name(self) -> str:
        if self.kind == "pair":
            return f"C[{self.labels[0]},{self.labels[1]}]"
        a, b = self.labels
        return f"C[{','.join(a)}|{','.join(b)}]"


def _matrix(rho) -> np.ndarray:
    r = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if r.shape != (4, 4):
        raise WrongDimension(f"two-qubit state must be 4x4, got {r.shape}")
    return r


def spin_flip(rho) -> np.ndarray:
    r = _matrix(rho)
    return SIGMA_YY @ r.conj() @ SIGMA_YY


def _factor_lambdas(b: np.ndarray) -> np.ndarray:
    """Wootters lambdas of ``rho = b b^H`` for a 4 x k factor ``b``, descending.

    They are the singular values of ``b^T (Y x Y) b``, which needs no matrix
    square root (``Y x Y`` is real and symmetric).
    """
    lam = np.linalg.svd(b.T @ SIGMA_YY.real @ b, compute_uv=False)
    return np.sort(np.concatenate([lam, np.zeros(max(0, 4 - lam.size))]))[::-1][:4]


def wootters_lambdas(rho) -> np.ndarray:
    """Square roots of the eigenvalues of rho * spin_flip(rho), descending."""
    r = _matrix(rho)
    w, v = np.linalg.eigh(0.5 * (r + r.conj().T))
    if np.min(w) < -_CLIP_EIG:
        raise NumericalBreakdown(f"rho has eigenvalue {np.min(w):.3e} < 0")
    return _factor_lambdas(v * np.sqrt(np.clip(w, 0.0, None)))


def pure_pair_lambdas(state: CoefficientTensor, a: str, b: str) -> np.ndarray:
    """Wootters lambdas of the reduced pair (a, b) of a pure register state.

    Uses the coefficient tensor itself as the factor of the reduced matrix,
    so no eigen-decomposition of rho is involved.
    """
    labels = state.labels
    if a not in labels or b not in labels or a == b:
        raise UnknownLabel(f"cannot form pair ({a}, {b}) from {labels}")
    i, j = sorted((labels.index(a), labels.index(b)))
    c = np.moveaxis(state.coeffs, (i, j), (0, 1)).reshape(4, -1)
    norm2 = float(np.sum(np.abs(c) ** 2))
    if norm2 < 1e-300:
        raise NullState("all helicity channels vanish")
    return _factor_lambdas(c / math.sqrt(norm2))


def pure_pair_concurrence(state: CoefficientTensor, a: str, b: str) -> float:
    lam = pure_pair_lambdas(state, a, b)
    return _clip_unit(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def _clip_unit(c: float) -> float:
    if c < -_CLIP_VALUE or c > 1 + _CLIP_VALUE:
        raise NumericalBreakdown(f"concurrence {c} outside [0, 1]")
    return min(max(c, 0.0), 1.0)


def concurrence(rho) -> float:
    lam = wootters_lambdas(rho)
    return _clip_unit(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def _as_density(state) -> DensityMatrix:
    if isinstance(state, CoefficientTensor):
        return density_matrix(state)
    if isinstance(state, DensityMatrix):
        return state
    raise TypeError(f"expected CoefficientTensor or DensityMatrix, got {type(state)}")


def pure_bipartite_concurrence(state, side_a: Iterable[str]) -> float:
    """sqrt(2 (1 - Tr rho_A^2)) for a globally pure state."""
    rho = _as_density(state)
    if purity(rho) < 1 - _PURE_TOL:
        raise MixedState("bipartite concurrence needs a pure global state")
    reduced = partial_trace(rho, side_a)
    return _clip_unit(float(np.sqrt(max(0.0, 2 * (1 - purity(reduced))))))


def pair_report(rho: DensityMatrix, a: str, b: str) -> ConcurrenceReport:
    reduced = partial_trace(rho, {a, b})
    lam = wootters_lambdas(reduced)
    value = _clip_unit(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))
    return ConcurrenceReport(tuple(reduced.labels), value, tuple(float(x) for x in lam))


def bipartition_report(rho: DensityMatrix, side_a: Iterable[str]) -> ConcurrenceReport:
    side_a = set(side_a)
    a = tuple(lab for lab in rho.labels if lab in side_a)
    b = tuple(lab for lab in rho.labels if lab not in side_a)
    value = pure_bipartite_concurrence(rho, a)
    return ConcurrenceReport((a, b), value, (purity(partial_trace(rho, a)),),
                             kind="bipartition")


def pairwise_concurrences(rho_full) -> list[ConcurrenceReport]:
    """Every qubit pair, then the first qubit against all the others."""
    rho = _as_density(rho_full)
    reports = [pair_report(rho, a, b)
               for a, b in itertools.combinations(rho.labels, 2)]
    if len(rho.labels) > 2:
        reports.append(bipartition_report(rho, rho.labels[:1]))
    return reports


def monogamy_residual(rho_full, focus: str) -> float:
    """C^2(A|BC) - C^2(AB) - C^2(AC) for a pure three-qubit state."""
    rho = _as_density(rho_full)
    if len(rho.labels) != 3:
        raise WrongDimension("monogamy residual is defined for three qubits")
    others = [lab for lab in rho.labels if lab != focus]
    if len(others) != 2:
        raise ValueError(f"focus {focus!r} is not a register label")
    whole = pure_bipartite_concurrence(rho, [focus])
    c_ab = concurrence(partial_trace(rho, {focus, others[0]}))
    c_ac = concurrence(partial_trace(rho, {focus, others[1]}))
    return whole**2 - c_ab**2 - c_ac**2
