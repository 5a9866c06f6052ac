"""Dense complex linear algebra and entropic functionals.

Everything is base-2: entropies come out in bits, which is also the unit
the communication ledger uses.  Validity checks use a tolerance of 1e-10;
callers asserting results should use 1e-9.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

VALIDITY_TOL = 1e-10

__all__ = [
    "DensityOperator",
    "Ensemble",
    "tensor_product",
    "reduced_density",
    "partial_trace",
    "schmidt_spectrum",
    "von_neumann_entropy",
    "trace_distance",
    "binary_entropy",
    "conditional_entropy",
    "holevo_information",
    "random_pure_vector",
    "random_density_matrix",
]


def _symmetrize(m: np.ndarray) -> np.ndarray:
    # suppress roundoff drift before Hermitian eigensolves
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True)
class DensityOperator:
    """A validated density matrix together with the factor dimensions of
    the tensor space it lives on."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        total = int(np.prod(self.dims))
        if m.ndim != 2 or m.shape != (total, total):
            raise ValueError(f"matrix shape {m.shape} does not match dims {self.dims}")
        if not np.all(np.isfinite(m)):
            raise ValueError("density matrix has non-finite entries")
        if np.max(np.abs(m - m.conj().T)) > VALIDITY_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > VALIDITY_TOL or abs(np.trace(m).imag) > VALIDITY_TOL:
            raise ValueError(f"density matrix trace {np.trace(m)} != 1")
        if np.min(np.linalg.eigvalsh(_symmetrize(m))) < -VALIDITY_TOL:
            raise ValueError("density matrix has a negative eigenvalue")

    @property
    def total_dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, amplitudes: np.ndarray, dims: Sequence[int]) -> "DensityOperator":
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(np.outer(v, v.conj()), tuple(dims))


@dataclass(frozen=True)
class Ensemble:
    """Classically labeled ensemble {(p_x, rho_x)} on a common tensor space."""

    members: tuple[tuple[float, DensityOperator], ...]

    def __post_init__(self):
        members = tuple((float(p), rho) for p, rho in self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ValueError("ensemble must have at least one member")
        probs = np.array([p for p, _ in members])
        if np.any(probs < -VALIDITY_TOL):
            raise ValueError("ensemble probabilities must be nonnegative")
        if abs(probs.sum() - 1.0) > VALIDITY_TOL:
            raise ValueError(f"ensemble probabilities sum to {probs.sum()}, not 1")
        dims = members[0][1].dims
        if any(rho.dims != dims for _, rho in members):
            raise ValueError("ensemble members live on different tensor spaces")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.members[0][1].dims

    def average_state(self) -> DensityOperator:
        acc = sum(p * rho.matrix for p, rho in self.members)
        return DensityOperator(_symmetrize(acc), self.dims)


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two vectors or two matrices (same kind)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise ValueError(f"operands must both be vectors or both matrices, got ndim {a.ndim} and {b.ndim}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("tensor_product operands must be finite")
    return np.kron(a, b)


def _keep_indices(dims: Sequence[int], keep: Iterable[int]) -> list[int]:
    keep = list(dict.fromkeys(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must be nonempty")
    for k in keep:
        if not 0 <= k < len(dims):
            raise IndexError(f"factor index {k} out of range for dims {tuple(dims)}")
    return keep


def reduced_density(amplitudes: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> DensityOperator:
    """Reduced density operator of a pure state, without materializing the
    full outer product (the traced-out side can be large)."""
    dims = tuple(int(d) for d in dims)
    keep = _keep_indices(dims, keep)
    rest = [i for i in range(len(dims)) if i not in keep]
    psi = np.asarray(amplitudes, dtype=complex).reshape(dims)
    psi = psi.transpose(keep + rest).reshape(int(np.prod([dims[k] for k in keep])), -1)
    rho = psi @ psi.conj().T
    return DensityOperator(_symmetrize(rho), tuple(dims[k] for k in keep))


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Trace out every factor not listed in ``keep``."""
    dims = rho.dims
    keep = _keep_indices(dims, keep)
    rest = [i for i in range(len(dims)) if i not in keep]
    n = len(dims)
    t = rho.matrix.reshape(dims + dims)
    # pair up the traced row/column axes
    for r in sorted(rest, reverse=True):
        t = np.trace(t, axis1=r, axis2=r + n)
        n -= 1
    # surviving axes are in ascending factor order; reorder to the caller's `keep`
    kept_sorted = sorted(keep)
    perm = [kept_sorted.index(k) for k in keep]
    t = t.transpose(perm + [i + len(keep) for i in perm])
    d_keep = int(np.prod([dims[k] for k in keep]))
    return DensityOperator(_symmetrize(t.reshape(d_keep, d_keep)), tuple(dims[k] for k in keep))


def schmidt_spectrum(amplitudes: np.ndarray, dims: Sequence[int], cut: Iterable[int]) -> np.ndarray:
    """Squared Schmidt coefficients across the bipartition (cut | rest),
    sorted descending."""
    dims = tuple(int(d) for d in dims)
    cut = _keep_indices(dims, cut)
    if len(cut) == len(dims):
        raise ValueError("cut must leave at least one factor on the other side")
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(v) - 1.0) > VALIDITY_TOL:
        raise ValueError("state must be normalized")
    rest = [i for i in range(len(dims)) if i not in cut]
    psi = v.reshape(dims).transpose(cut + rest).reshape(int(np.prod([dims[k] for k in cut])), -1)
    s = np.linalg.svd(psi, compute_uv=False)
    probs = np.clip(s**2, 0.0, None)
    probs /= probs.sum()
    probs = np.sort(probs)[::-1]
    return probs[probs > 1e-12]


def _entropy_of_matrix(m: np.ndarray) -> float:
    eigs = np.linalg.eigvalsh(_symmetrize(m))
    eigs = eigs[eigs > 1e-15]
    return float(-np.sum(eigs * np.log2(eigs)))


def von_neumann_entropy(rho: DensityOperator) -> float:
    """Entropy -tr(rho log2 rho) in bits, with 0 log 0 := 0."""
    return _entropy_of_matrix(rho.matrix)


def trace_distance(a: DensityOperator, b: DensityOperator) -> float:
    """Half the trace norm of a - b; in [0, 1], equals sqrt(1-|<a|b>|^2)
    for pure states."""
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")
    eigs = np.linalg.eigvalsh(_symmetrize(a.matrix - b.matrix))
    return float(0.5 * np.sum(np.abs(eigs)))


def binary_entropy(x: float) -> float:
    """H2(x) = -x log2 x - (1-x) log2(1-x) on [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy argument {x} outside [0, 1]")
    total = 0.0
    for t in (x, 1.0 - x):
        if t > 0.0:
            total -= t * np.log2(t)
    return float(total)


def conditional_entropy(rho: DensityOperator, y_factors: Sequence[int]) -> float:
    """H(Y|Z) = H(YZ) - H(Z), where Y is the listed factors and Z the rest."""
    y = _keep_indices(rho.dims, y_factors)
    z = [i for i in range(len(rho.dims)) if i not in y]
    if not z:
        raise ValueError("conditioning system Z is empty")
    return von_neumann_entropy(rho) - von_neumann_entropy(partial_trace(rho, z))


def holevo_information(ensemble: Ensemble, subsystem: Sequence[int] | None = None) -> float:
    """Mutual information between the classical label and the named
    subsystem: H(sum_x p_x rho_x) - sum_x p_x H(rho_x)."""
    if subsystem is None:
        reduce = lambda rho: rho
    else:
        reduce = lambda rho: partial_trace(rho, subsystem)
    avg = reduce(ensemble.average_state())
    chi = von_neumann_entropy(avg)
    for p, rho in ensemble.members:
        if p > 0.0:
            chi -= p * von_neumann_entropy(reduce(rho))
    if -VALIDITY_TOL < chi < 0.0:
        chi = 0.0  # roundoff; Holevo information is nonnegative
    return float(chi)


def random_pure_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector from normalized complex Gaussians."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density_matrix(dims: Sequence[int], rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims))
    rank = total if rank is None else int(rank)
    g = rng.normal(size=(total, rank)) + 1j * rng.normal(size=(total, rank))
    m = g @ g.conj().T
    return DensityOperator(_symmetrize(m / np.trace(m).real), dims)
