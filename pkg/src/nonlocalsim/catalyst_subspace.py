"""Exact evolution of the identification circuit in its reachable subspace.

Starting from (input on R x pair) tensor (catalyst copies of alpha), every
step of the identification circuit keeps the global state inside the span
of configurations where at most one of the m pair registers deviates from
alpha.  Tracking only those configurations shrinks the state from
dimR * pairdim^m * m * 2 amplitudes to dimR * (1 + (pairdim-1) m) * m * 2,
which makes the m = 16 and d = 2 grid points of the bound sweeps exact
instead of out of budget.  The dense engine in `protocols` validates this
one wherever both fit.

Basis bookkeeping: content basis f_0 = alpha, f_1..f_K an orthonormal
completion (a preferred first complement vector may be supplied, e.g. the
deviation direction of an ansatz input); pattern index 0 means every pair
holds alpha, pattern 1 + k*m + pos means pair `pos` holds f_{k+1}.
"""
from __future__ import annotations

import numpy as np

from .linalg import VALIDITY_TOL, DensityOperator


def complete_basis(alpha: np.ndarray, preferred: np.ndarray | None = None) -> np.ndarray:
    """Unitary whose first column is alpha (and second the preferred
    complement direction, if given)."""
    alpha = np.asarray(alpha, dtype=complex).reshape(-1)
    dim = alpha.size
    cols = [alpha / np.linalg.norm(alpha)]
    if preferred is not None:
        v = np.asarray(preferred, dtype=complex).reshape(-1).copy()
        for c in cols:
            v -= np.vdot(c, v) * c
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            raise ValueError("preferred complement vector is parallel to alpha")
        cols.append(v / norm)
    for i in range(dim):
        if len(cols) == dim:
            break
        v = np.zeros(dim, dtype=complex)
        v[i] = 1.0
        for c in cols:
            v -= np.vdot(c, v) * c
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            cols.append(v / norm)
    if len(cols) != dim:
        raise RuntimeError("failed to complete orthonormal basis")
    return np.column_stack(cols)


class CatalystSubspaceEngine:
    """State array psi[r, pattern, s, c] over the reachable configurations."""

    def __init__(self, alpha: np.ndarray, m: int, ref_dim: int = 1,
                 preferred_complement: np.ndarray | None = None):
        if m < 2:
            raise ValueError(f"m must be >= 2, got {m}")
        self.alpha = np.asarray(alpha, dtype=complex).reshape(-1)
        self.m = int(m)
        self.ref_dim = int(ref_dim)
        self.pair_dim = self.alpha.size
        self.k = self.pair_dim - 1
        self.basis = complete_basis(self.alpha, preferred_complement)
        s = np.full(m, 1.0 / np.sqrt(m), dtype=complex)
        p_s = np.outer(s, s.conj())
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        self._flag_unitary = np.kron(p_s, np.eye(2)) + np.kron(np.eye(m) - p_s, x)

    # -- state construction --------------------------------------------------

    def content_coefficients(self, phi: np.ndarray) -> np.ndarray:
        """Rewrite an input on R x pair (given as a (ref_dim, pair_dim)
        coefficient matrix in the computational basis) in the content basis."""
        phi = np.asarray(phi, dtype=complex).reshape(self.ref_dim, self.pair_dim)
        if abs(np.linalg.norm(phi) - 1.0) > VALIDITY_TOL:
            raise ValueError("input state must be normalized")
        return phi @ self.basis.conj()

    def attach(self, phi: np.ndarray) -> np.ndarray:
        """Adjoin the catalyst, the uniform control register, and a |0> flag."""
        c = self.content_coefficients(phi)
        m, k = self.m, self.k
        psi = np.zeros((self.ref_dim, 1 + k * m, m, 2), dtype=complex)
        psi[:, 0, :, 0] = c[:, :1] / np.sqrt(m)
        for t in range(1, self.pair_dim):
            psi[:, 1 + (t - 1) * m, :, 0] = c[:, t : t + 1] / np.sqrt(m)
        return psi

    # -- circuit steps ---------------------------------------------------------

    def cycle(self, psi: np.ndarray, inverse: bool = False) -> np.ndarray:
        """Control-conditioned cyclic shift of the deviation position."""
        m, k = self.m, self.k
        out = psi.copy()
        dev = psi[:, 1:, :, :].reshape(self.ref_dim, k, m, m, 2)
        rolled = np.empty_like(dev)
        for j in range(m):
            shift = -j if inverse else j
            rolled[:, :, :, j, :] = np.roll(dev[:, :, :, j, :], shift, axis=2)
        out[:, 1:, :, :] = rolled.reshape(self.ref_dim, k * m, m, 2)
        return out

    def flag(self, psi: np.ndarray) -> np.ndarray:
        shape = psi.shape
        flat = psi.reshape(-1, self.m * 2)
        return (flat @ self._flag_unitary.T).reshape(shape)

    def phase_flag(self, psi: np.ndarray) -> np.ndarray:
        out = psi.copy()
        out[..., 0] *= -1.0
        return out

    def identification_pass(self, psi: np.ndarray) -> np.ndarray:
        """Cycle, flag the control register, uncycle: one full pass of the
        approximate identification (its own reverse)."""
        return self.cycle(self.flag(self.cycle(psi)), inverse=True)

    def ideal_output(self, phi: np.ndarray) -> np.ndarray:
        """Reference measurement output on the same extended space: the flag
        records pair-1 content, catalyst and control are spectators."""
        c = self.content_coefficients(phi)
        m, k = self.m, self.k
        psi = np.zeros((self.ref_dim, 1 + k * m, m, 2), dtype=complex)
        psi[:, 0, :, 0] = c[:, :1] / np.sqrt(m)
        for t in range(1, self.pair_dim):
            psi[:, 1 + (t - 1) * m, :, 1] = c[:, t : t + 1] / np.sqrt(m)
        return psi

    # -- outputs ---------------------------------------------------------------

    @staticmethod
    def overlap(a: np.ndarray, b: np.ndarray) -> complex:
        return complex(np.vdot(a.reshape(-1), b.reshape(-1)))

    def reduce_to_input(self, psi: np.ndarray) -> DensityOperator:
        """Trace out catalyst, control and flag; density operator on
        R x pair in the computational basis."""
        m, k = self.m, self.k
        r_dim = self.ref_dim
        # regroup into (kept pair-1 content t; traced catalyst deviation tau)
        tau_count = 1 + k * (m - 1)
        grouped = np.zeros((r_dim, self.pair_dim, tau_count, m, 2), dtype=complex)
        grouped[:, 0, 0] = psi[:, 0]
        for kk in range(k):
            grouped[:, kk + 1, 0] = psi[:, 1 + kk * m]
            for pos in range(1, m):
                grouped[:, 0, 1 + kk * (m - 1) + (pos - 1)] = psi[:, 1 + kk * m + pos]
        mat = grouped.reshape(r_dim * self.pair_dim, -1)
        rho = mat @ mat.conj().T
        expand = np.kron(np.eye(r_dim), self.basis)
        rho_full = expand @ rho @ expand.conj().T
        rho_full = 0.5 * (rho_full + rho_full.conj().T)
        return DensityOperator(rho_full, (r_dim, self.pair_dim))


def identification_distance(phi: np.ndarray, alpha: np.ndarray, m: int,
                            preferred_complement: np.ndarray | None = None) -> float:
    """Half trace-norm between the approximate and ideal identification
    outputs for the pure input phi on R x pair (both outputs are pure)."""
    phi = np.asarray(phi, dtype=complex)
    ref_dim = phi.reshape(-1).size // np.asarray(alpha).reshape(-1).size
    eng = CatalystSubspaceEngine(alpha, m, ref_dim, preferred_complement)
    fin = eng.identification_pass(eng.attach(phi))
    cor = eng.ideal_output(phi)
    ov = abs(eng.overlap(cor, fin))
    return float(np.sqrt(max(0.0, 1.0 - min(ov, 1.0) ** 2)))


def simulation_output_density(phi: np.ndarray, alpha: np.ndarray, m: int,
                              preferred_complement: np.ndarray | None = None) -> DensityOperator:
    """Output of the full simulation round (identify, phase, un-identify,
    discard ancillas) on R x pair."""
    phi = np.asarray(phi, dtype=complex)
    ref_dim = phi.reshape(-1).size // np.asarray(alpha).reshape(-1).size
    eng = CatalystSubspaceEngine(alpha, m, ref_dim, preferred_complement)
    psi = eng.identification_pass(eng.attach(phi))
    psi = eng.phase_flag(psi)
    psi = eng.identification_pass(psi)
    return eng.reduce_to_input(psi)
