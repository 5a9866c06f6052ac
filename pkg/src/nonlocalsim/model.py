"""Register model: named qudit registers with party ownership, global pure
states over them, the protocol's gates and resource states, and the
communication ledger.

Locality is an enforced contract: every gate application checks that the
acting party owns all target registers, and the only way to change
ownership is ``send_register``, which charges the ledger.  The designated
party ``REFEREE`` bypasses ownership checks; it marks analysis-only global
operations (ideal measurements, the exact gate used as reference), never
protocol steps.

Index convention: amplitudes enumerate registers in layout order with the
first register most significant, so ``amps.reshape(layout.dims)`` puts
register i on axis i.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels, linalg
from .linalg import VALIDITY_TOL, DensityOperator

ALICE = "alice"
BOB = "bob"
REFEREE = "referee"

DEFAULT_MAX_AMPLITUDES = 2**24


class LocalityError(ValueError):
    """A party touched a register it does not own."""


class BudgetError(RuntimeError):
    """A state would exceed the amplitude cap."""

    def __init__(self, needed: int, cap: int, context: str):
        self.needed = needed
        self.cap = cap
        self.context = context
        super().__init__(
            f"state would need {needed} amplitudes ({context}), exceeding the cap of {cap}; "
            "set NONLOCALSIM_MAX_AMPLITUDES to override"
        )


def max_amplitudes() -> int:
    raw = os.environ.get("NONLOCALSIM_MAX_AMPLITUDES", "")
    return int(raw) if raw else DEFAULT_MAX_AMPLITUDES


def check_budget(total_dim: int, context: str, cap: int | None = None) -> None:
    cap = max_amplitudes() if cap is None else cap
    if total_dim > cap:
        raise BudgetError(total_dim, cap, context)


def party_rank(party: str) -> int | None:
    """Canonical order used to classify a transmission as forward/backward.

    alice precedes bob; numbered parties rank by their number (party1 is
    alice's seat).  The referee never sends.
    """
    if party == ALICE:
        return 0
    if party == BOB:
        return 1
    if party.startswith("party") and party[5:].isdigit():
        return int(party[5:]) - 1
    return None


@dataclass(frozen=True)
class Register:
    label: str
    dim: int
    owner: str

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"register {self.label!r} has dimension {self.dim} < 1")


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered named registers; the locality contract of a state."""

    registers: tuple[Register, ...]

    def __post_init__(self):
        object.__setattr__(self, "registers", tuple(self.registers))
        labels = [r.label for r in self.registers]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate register labels in {labels}")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(r.label for r in self.registers)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r.dim for r in self.registers)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims)) if self.registers else 1

    def axis(self, label: str) -> int:
        for i, r in enumerate(self.registers):
            if r.label == label:
                return i
        raise KeyError(f"no register labeled {label!r} (have {self.labels})")

    def register(self, label: str) -> Register:
        return self.registers[self.axis(label)]

    def owner(self, label: str) -> str:
        return self.register(label).owner

    def with_owner(self, label: str, owner: str) -> "RegisterLayout":
        i = self.axis(label)
        regs = list(self.registers)
        regs[i] = Register(regs[i].label, regs[i].dim, owner)
        return RegisterLayout(tuple(regs))

    def extended(self, new: Iterable[Register]) -> "RegisterLayout":
        return RegisterLayout(self.registers + tuple(new))


@dataclass(frozen=True)
class PureState:
    """Normalized global wavefunction over a register layout."""

    layout: RegisterLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", a)
        if a.size != self.layout.total_dim:
            raise ValueError(
                f"amplitude vector length {a.size} != layout dimension {self.layout.total_dim}"
            )
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > VALIDITY_TOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {VALIDITY_TOL}")

    @property
    def total_dim(self) -> int:
        return self.layout.total_dim

    def overlap(self, other: "PureState") -> complex:
        if self.layout.labels != other.layout.labels:
            raise ValueError("overlap requires identical register order")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self, keep_labels: Sequence[str] | None = None) -> DensityOperator:
        """Reduced density operator on the named registers (all by default)."""
        labels = self.layout.labels if keep_labels is None else tuple(keep_labels)
        keep = [self.layout.axis(l) for l in labels]
        return linalg.reduced_density(self.amplitudes, self.layout.dims, keep)


@dataclass(frozen=True)
class GateSpec:
    """A unitary bound to target registers and an acting party."""

    name: str
    matrix: np.ndarray
    targets: tuple[str, ...]
    party: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "targets", tuple(self.targets))
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"gate {self.name!r} matrix must be square, got {m.shape}")
        if np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) > VALIDITY_TOL:
            raise ValueError(f"gate {self.name!r} is not unitary within {VALIDITY_TOL}")


@dataclass(frozen=True)
class LedgerEvent:
    step: str
    register: str
    sender: str
    receiver: str
    qubits: float
    direction: str  # "forward" (toward higher party rank) or "backward"


@dataclass
class CommLedger:
    """Accumulated qubit communication, one event per register move.

    ``integral`` switches the per-move charge from log2(dim) to
    ceil(log2(dim)); the exact-real mode matches cost formulas for
    power-of-two dimensions.
    """

    integral: bool = False
    events: list[LedgerEvent] = field(default_factory=list)

    def record(self, step: str, register: str, sender: str, receiver: str, dim: int, direction: str) -> None:
        if direction not in ("forward", "backward"):
            raise ValueError(f"unknown direction {direction!r}")
        qubits = float(np.log2(dim))
        if self.integral:
            qubits = float(np.ceil(qubits - 1e-12))
        self.events.append(LedgerEvent(step, register, sender, receiver, qubits, direction))

    def _total(self, direction: str) -> float:
        return float(sum(e.qubits for e in self.events if e.direction == direction))

    @property
    def forward_qubits(self) -> float:
        return self._total("forward")

    @property
    def backward_qubits(self) -> float:
        return self._total("backward")

    @property
    def total_qubits(self) -> float:
        return self.forward_qubits + self.backward_qubits

    @property
    def classical_bits(self) -> float:
        # teleportation / super-dense coding: 1 qubit <-> 2 classical bits
        return 2.0 * self.total_qubits

    def as_dict(self) -> dict:
        return {
            "forward_qubits": self.forward_qubits,
            "backward_qubits": self.backward_qubits,
            "classical_bits_equivalent": self.classical_bits,
            "events": [
                {
                    "step": e.step,
                    "register": e.register,
                    "sender": e.sender,
                    "receiver": e.receiver,
                    "qubits": e.qubits,
                    "direction": e.direction,
                }
                for e in self.events
            ],
        }


# ---------------------------------------------------------------------------
# resource states and gates
# ---------------------------------------------------------------------------


def basis_vector(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def make_phi(d: int, a_label: str = "A", b_label: str = "B") -> PureState:
    """Maximally entangled state (1/sqrt(d)) sum_{i=1..d} |ii> on two
    (d+1)-dimensional registers; level 0 is unpopulated."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    n = d + 1
    amps = np.zeros(n * n, dtype=complex)
    for i in range(1, n):
        amps[i * n + i] = 1.0 / np.sqrt(d)
    layout = RegisterLayout((Register(a_label, n, ALICE), Register(b_label, n, BOB)))
    return PureState(layout, amps)


def make_phi_minus(d: int, a_label: str = "A", b_label: str = "B") -> PureState:
    """(|Phi> - |00>)/sqrt(2): the unique flipped eigenvector of the swap
    gate built by make_gate_u."""
    phi = make_phi(d, a_label, b_label)
    amps = phi.amplitudes.copy() / np.sqrt(2)
    amps[0] -= 1.0 / np.sqrt(2)
    return PureState(phi.layout, amps)


def make_gate_u(d: int, a_label: str = "A", b_label: str = "B") -> GateSpec:
    """The Hermitian unitary that swaps |00> with the maximally entangled
    |Phi> and fixes the orthogonal complement of their span."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    n = d + 1
    zero = basis_vector(n * n, 0)
    phi = make_phi(d).amplitudes
    p = np.outer(zero, zero.conj()) + np.outer(phi, phi.conj())
    u = np.outer(zero, phi.conj()) + np.outer(phi, zero.conj()) + np.eye(n * n) - p
    return GateSpec("entangled-swap", u, (a_label, b_label), REFEREE)


def make_uniform_s(m: int, label: str = "S", owner: str = ALICE) -> PureState:
    """Uniform superposition over the m control values."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    amps = np.full(m, 1.0 / np.sqrt(m), dtype=complex)
    return PureState(RegisterLayout((Register(label, m, owner),)), amps)


def product_state(registers: Sequence[Register], vectors: Sequence[np.ndarray]) -> PureState:
    """Tensor product of per-register vectors in the given order."""
    if len(registers) != len(vectors):
        raise ValueError("one vector per register required")
    amps = np.array([1.0], dtype=complex)
    for reg, vec in zip(registers, vectors):
        v = np.asarray(vec, dtype=complex).reshape(-1)
        if v.size != reg.dim:
            raise ValueError(f"vector length {v.size} != dim {reg.dim} of register {reg.label!r}")
        amps = np.kron(amps, v)
    return PureState(RegisterLayout(tuple(registers)), amps)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def _require_ownership(state: PureState, labels: Iterable[str], party: str, what: str) -> None:
    if party == REFEREE:
        return
    for label in labels:
        owner = state.layout.owner(label)
        if owner != party:
            raise LocalityError(
                f"{what}: register {label!r} is owned by {owner!r}, not by acting party {party!r}"
            )


def _apply_matrix_on_axes(amps: np.ndarray, dims: tuple[int, ...], axes: Sequence[int], matrix: np.ndarray) -> np.ndarray:
    axes = list(axes)
    block = int(np.prod([dims[a] for a in axes]))
    if axes == list(range(len(dims) - len(axes), len(dims))):
        # targets already form the trailing block: no transpose copies needed
        return (amps.reshape(-1, block) @ matrix.T).reshape(-1)
    rest = [i for i in range(len(dims)) if i not in axes]
    t = amps.reshape(dims).transpose(axes + rest)
    moved_shape = t.shape
    out = (matrix @ t.reshape(block, -1)).reshape(moved_shape)
    return out.transpose(np.argsort(axes + rest)).reshape(-1)


def apply_local(state: PureState, gate: GateSpec) -> PureState:
    """Apply a gate to its target registers, enforcing locality."""
    _require_ownership(state, gate.targets, gate.party, f"gate {gate.name!r}")
    axes = [state.layout.axis(t) for t in gate.targets]
    block = int(np.prod([state.layout.dims[a] for a in axes]))
    if gate.matrix.shape[0] != block:
        raise ValueError(
            f"gate {gate.name!r} acts on dimension {gate.matrix.shape[0]}, targets span {block}"
        )
    amps = _apply_matrix_on_axes(state.amplitudes, state.layout.dims, axes, gate.matrix)
    return PureState(state.layout, amps)


def apply_controlled_cycle(
    state: PureState,
    s_label: str,
    cycle_labels: Sequence[str],
    party: str,
    inverse: bool = False,
) -> PureState:
    """Shift the contents of the cycle registers by the control value.

    With control register S in |j>, cycle position i moves to position
    (i+j) mod m, i.e. position k receives the old content of k-j.  Worked
    m=3 example (contents shown left to right):

        j=0:  (a, b, c) -> (a, b, c)
        j=1:  (a, b, c) -> (c, a, b)
        j=2:  (a, b, c) -> (b, c, a)

    The acting party must own S and every cycled register; in the
    two-party protocol each party cycles only its own halves and the
    composition of the two calls realizes the full pair cycle.
    """
    labels = list(cycle_labels)
    _require_ownership(state, [s_label] + labels, party, "controlled cycle")
    s_axis = state.layout.axis(s_label)
    axes = tuple(state.layout.axis(l) for l in labels)
    amps = kernels.controlled_cycle(state.amplitudes, state.layout.dims, s_axis, axes, inverse)
    return PureState(state.layout, amps)


def coherent_flag(
    state: PureState,
    projector: np.ndarray,
    target_labels: Sequence[str],
    flag_label: str,
    party: str,
) -> PureState:
    """Coherently write subspace membership into a flag qubit.

    Applies P (x) I + (I-P) (x) X on targets+flag: flag parity flips
    exactly on the orthogonal complement of P, so |0> means "inside".
    Applying it twice is the identity.
    """
    targets = list(target_labels)
    _require_ownership(state, targets + [flag_label], party, "coherent flag")
    if state.layout.register(flag_label).dim != 2:
        raise ValueError(f"flag register {flag_label!r} must be a qubit")
    p = np.asarray(projector, dtype=complex)
    block = int(np.prod([state.layout.register(t).dim for t in targets]))
    if p.shape != (block, block):
        raise ValueError(f"projector shape {p.shape} does not match target dimension {block}")
    if np.max(np.abs(p - p.conj().T)) > VALIDITY_TOL or np.max(np.abs(p @ p - p)) > VALIDITY_TOL:
        raise ValueError("flag operator must be an orthogonal projector (P = P^2 = P^dagger)")
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    flag_unitary = np.kron(p, np.eye(2)) + np.kron(np.eye(block) - p, x)
    axes = [state.layout.axis(t) for t in targets] + [state.layout.axis(flag_label)]
    amps = _apply_matrix_on_axes(state.amplitudes, state.layout.dims, axes, flag_unitary)
    return PureState(state.layout, amps)


def send_register(
    state: PureState,
    label: str,
    sender: str,
    receiver: str,
    ledger: CommLedger,
    step: str = "send",
    direction: str | None = None,
) -> PureState:
    """Transfer ownership of a register, charging log2(dim) qubits.

    Amplitudes never change; only the layout's ownership metadata and the
    ledger do.  Direction defaults to forward when the receiver outranks
    the sender (alice -> bob is forward).
    """
    owner = state.layout.owner(label)
    if owner != sender:
        raise LocalityError(f"cannot send {label!r}: owned by {owner!r}, not {sender!r}")
    if sender == receiver:
        raise ValueError(f"register {label!r} is already held by {receiver!r}")
    if direction is None:
        rs, rr = party_rank(sender), party_rank(receiver)
        if rs is None or rr is None:
            raise ValueError(
                f"cannot infer direction for {sender!r} -> {receiver!r}; pass direction explicitly"
            )
        direction = "forward" if rr > rs else "backward"
    ledger.record(step, label, sender, receiver, state.layout.register(label).dim, direction)
    return PureState(state.layout.with_owner(label, receiver), state.amplitudes)


def adjoin(state: PureState, other: PureState, context: str = "adjoin") -> PureState:
    """Tensor-extend the state with fresh registers carried by `other`."""
    clash = set(state.layout.labels) & set(other.layout.labels)
    if clash:
        raise ValueError(f"register labels already in use: {sorted(clash)}")
    total = state.total_dim * other.total_dim
    check_budget(total, context)
    layout = state.layout.extended(other.layout.registers)
    return PureState(layout, np.kron(state.amplitudes, other.amplitudes))


def discard(state: PureState, keep_labels: Sequence[str]) -> DensityOperator:
    """Trace out everything but the named registers."""
    return state.density(keep_labels)
