"""Multipartite helicity states produced by consecutive scatterings.

The register is ordered target first, then projectiles in the order they
scatter.  Qubit index 0 stands for helicity +1 and index 1 for -1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .amplitude import amplitude_table, helicity_index
from .errors import NullState, SingularKinematics, UnknownLabel, WrongDimension
from .relkin import CascadeKinematics

MAX_SCATTERINGS = 6

_HERMITIAN_TOL = 1e-12
_TRACE_TOL = 1e-12
_PSD_TOL = 1e-10


def register_labels(n_scatterings: int) -> tuple[str, ...]:
    return ("t",) + tuple(f"p{i}" for i in range(1, n_scatterings + 1))


def parse_initial(initial: Sequence[int] | str, n_scatterings: int | None = None
                  ) -> tuple[int, ...]:
    """Normalise initial helicities to a tuple of +1/-1.

    A sequence holds helicities (+1/-1).  A string holds qubit indices
    (0 for +1, 1 for -1), comma separated, e.g. ``"0,1,1"``.
    """
    if isinstance(initial, str):
        bits = [x.strip() for x in initial.replace(";", ",").split(",") if x.strip()]
        if any(b not in ("0", "1") for b in bits):
            raise ValueError(f"qubit indices must be 0 or 1, got {initial!r}")
        hel = tuple(1 - 2 * int(b) for b in bits)
    else:
        values = [int(v) for v in initial]
        if any(v not in (1, -1) for v in values):
            raise ValueError(f"helicities must be +1 or -1, got {values}")
        hel = tuple(values)
    if n_scatterings is not None and len(hel) != n_scatterings + 1:
        raise ValueError(
            f"need {n_scatterings + 1} initial helicities, got {len(hel)}")
    return hel


@dataclass(frozen=True)
class CoefficientTensor:
    coeffs: np.ndarray
    kinematics: CascadeKinematics
    initial_helicities: tuple[int, ...]

    @property
    def n_scatterings(self) -> int:
        return self.coeffs.ndim - 1

    @property
    def labels(self) -> tuple[str, ...]:
        return register_labels(self.n_scatterings)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def vector(self) -> np.ndarray:
        return self.coeffs.reshape(-1)


def cascade_coefficients(kin: CascadeKinematics, initial: Sequence[int],
                         m: float | None = None, M: float | None = None
                         ) -> CoefficientTensor:
    """Helicity amplitudes of the final register for a given initial product state.

    Each scattering contracts the current target index with one amplitude
    table and appends the outgoing projectile index, so the intermediate
    target helicities are summed at every step.
    """
    m = kin.m if m is None else m
    M = kin.M if M is None else M
    n = len(kin)
    if not 1 <= n <= MAX_SCATTERINGS:
        raise ValueError(f"number of scatterings must be in [1, {MAX_SCATTERINGS}]")
    hel = parse_initial(initial, n)
    state = np.zeros(2, dtype=complex)
    state[helicity_index(hel[0])] = 1.0
    for i, scat in enumerate(kin, start=1):
        try:
            table = amplitude_table(scat, M, m)
        except SingularKinematics as exc:
            raise SingularKinematics(str(exc), index=i) from exc
        # (r_new, h_final, r_old) for this projectile's initial helicity
        step = table.entries[:, :, :, helicity_index(hel[i])]
        state = np.tensordot(step, state, axes=([2], [0]))
        # tensordot leaves (r_new, h_i, earlier projectiles...)
        state = np.moveaxis(state, 1, -1)
    state.setflags(write=False)
    return CoefficientTensor(state, kin, hel)


@dataclass(frozen=True)
class DensityMatrix:
    entries: np.ndarray
    labels: tuple[str, ...]
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        labels = tuple(self.labels)
        dims = tuple(self.dims) or (2,) * len(labels)
        if len(dims) != len(labels):
            raise WrongDimension("one dimension per label required")
        dim = int(np.prod(dims))
        if entries.shape != (dim, dim):
            raise WrongDimension(f"expected {dim}x{dim} matrix, got {entries.shape}")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels {labels}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def check(self) -> None:
        """Raise ValueError unless Hermitian, unit-trace and positive semidefinite."""
        r = self.entries
        if np.max(np.abs(r - r.conj().T)) > _HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(r) - 1) > _TRACE_TOL:
            raise ValueError("density matrix trace differs from 1")
        if np.min(np.linalg.eigvalsh(r)) < -_PSD_TOL:
            raise ValueError("density matrix has a negative eigenvalue")

    def to_document(self) -> dict:
        return {
            "dims": list(self.dims),
            "labels": list(self.labels),
            "entries": [[[float(z.real), float(z.imag)] for z in row]
                        for row in self.entries],
        }

    @classmethod
    def from_document(cls, doc: dict) -> "DensityMatrix":
        entries = np.array([[complex(re, im) for re, im in row]
                            for row in doc["entries"]])
        return cls(entries, tuple(doc["labels"]), tuple(doc["dims"]))


def pure_density(vector: np.ndarray, labels: Sequence[str]) -> DensityMatrix:
    v = np.asarray(vector, dtype=complex).reshape(-1)
    norm2 = float(np.vdot(v, v).real)
    if norm2 < 1e-300:
        raise NullState("state vector has zero norm")
    rho = np.outer(v, v.conj()) / norm2
    # exact Hermiticity, independent of the outer-product rounding
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, tuple(labels))


def density_matrix(d: CoefficientTensor) -> DensityMatrix:
    if d.norm2() < 1e-300:
        raise NullState("all helicity channels vanish")
    return pure_density(d.vector(), d.labels)


def partial_trace(rho: DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    """Reduced state on ``keep``, kept subsystems in their original order."""
    keep = set(keep)
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    unknown = keep - set(rho.labels)
    if unknown:
        raise UnknownLabel(f"unknown subsystem labels {sorted(unknown)}")
    n = len(rho.labels)
    kept = [i for i, lab in enumerate(rho.labels) if lab in keep]
    traced = [i for i in range(n) if i not in kept]
    t = rho.entries.reshape(rho.dims + rho.dims)
    # bring (kept rows, traced rows, kept cols, traced cols) together
    t = np.transpose(t, kept + traced + [n + i for i in kept] + [n + i for i in traced])
    dk = int(np.prod([rho.dims[i] for i in kept]))
    dt = int(np.prod([rho.dims[i] for i in traced])) if traced else 1
    t = t.reshape(dk, dt, dk, dt)
    reduced = np.einsum("ajbj->ab", t)
    return DensityMatrix(reduced, tuple(rho.labels[i] for i in kept),
                         tuple(rho.dims[i] for i in kept))


def purity(rho: DensityMatrix) -> float:
    r = rho.entries
    return float(np.real(np.einsum("ij,ji->", r, r)))
