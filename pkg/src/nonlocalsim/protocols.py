"""Executable protocols over the register model.

The central routine identifies whether a shared bipartite state matches a
known target state, writing the answer coherently into a flag qubit on
Bob's side.  The ideal version applies a global two-outcome coherent
measurement; the approximate version uses m-1 pre-shared copies of the
target as a catalyst plus a control register that is passed once in each
direction, cycling the m pair registers conditioned on the control.

Built on top of that: the gate-simulation round (flag, phase, unflag),
its generalization to gates with r flipped eigenvectors, a k-party
variant that circulates the control register, and the permutation-test
probability the informal argument is based on.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import schur

from . import model
from .linalg import DensityOperator
from .model import (
    ALICE,
    BOB,
    REFEREE,
    CommLedger,
    GateSpec,
    PureState,
    Register,
    RegisterLayout,
)

DIAG_PHASE = np.diag([-1.0, 1.0]).astype(complex)


@dataclass(frozen=True)
class MeasurementTarget:
    """The state to identify: a bipartite pure state whose two registers
    name the systems (and owners) it lives on."""

    alpha: PureState
    d: int | None = None

    def __post_init__(self):
        if len(self.alpha.layout.registers) != 2:
            raise ValueError("measurement target must live on exactly two registers")

    @property
    def a_label(self) -> str:
        return self.alpha.layout.labels[0]

    @property
    def b_label(self) -> str:
        return self.alpha.layout.labels[1]


@dataclass
class ProtocolResult:
    """Final state (pure before any discard, density after), the
    communication ledger, and the ordered step transcript."""

    ledger: CommLedger
    transcript: list[str]
    final_pure: PureState | None = None
    final_density: DensityOperator | None = None
    kept_labels: tuple[str, ...] | None = None


def _flag_register(owner: str, label: str) -> PureState:
    return model.product_state([Register(label, 2, owner)], [model.basis_vector(2, 0)])


def _catalyst_state(target: MeasurementTarget, m: int, copy_labels) -> PureState:
    """(m-1) shared copies of the target on fresh pair registers."""
    regs: list[Register] = []
    amps = np.array([1.0], dtype=complex)
    ra, rb = target.alpha.layout.registers
    for la, lb in copy_labels:
        regs.append(Register(la, ra.dim, ra.owner))
        regs.append(Register(lb, rb.dim, rb.owner))
        amps = np.kron(amps, target.alpha.amplitudes)
    return PureState(RegisterLayout(tuple(regs)), amps)


def _check_target_matches(state: PureState, target: MeasurementTarget) -> None:
    for reg in target.alpha.layout.registers:
        have = state.layout.register(reg.label)
        if have.dim != reg.dim:
            raise ValueError(
                f"register {reg.label!r} has dimension {have.dim}, target expects {reg.dim}"
            )


def run_ideal_measurement(
    input_state: PureState,
    target: MeasurementTarget,
    flag_label: str = "C",
) -> ProtocolResult:
    """Reference coherent measurement {|alpha><alpha|, complement}.

    Global (referee-applied), zero communication, exactly unitary: adjoins
    a Bob-owned flag qubit and flips it on the orthogonal complement.
    """
    _check_target_matches(input_state, target)
    ledger = CommLedger()
    transcript = ["adjoin flag"]
    state = model.adjoin(input_state, _flag_register(BOB, flag_label), "ideal measurement flag")
    alpha = target.alpha.amplitudes
    proj = np.outer(alpha, alpha.conj())
    transcript.append("coherent flag on target pair")
    state = model.coherent_flag(state, proj, [target.a_label, target.b_label], flag_label, REFEREE)
    return ProtocolResult(ledger=ledger, transcript=transcript, final_pure=state)


def _ma_sequence(
    state: PureState,
    m: int,
    pair_labels: list[tuple[str, str]],
    s_label: str,
    flag_label: str,
    ledger: CommLedger,
    transcript: list[str],
    attach_flag: bool,
) -> PureState:
    """One full pass of the approximate identification circuit.

    The same sequence is its own reverse (the flag conjugation is an
    involution and the cycles cancel symmetrically), so the erasure pass
    replays it verbatim, communication included.
    """
    a_cycle = [la for la, _ in pair_labels]
    b_cycle = [lb for _, lb in pair_labels]
    s_vec = model.make_uniform_s(m).amplitudes
    s_proj = np.outer(s_vec, s_vec.conj())

    transcript.append("alice controlled cycle")
    state = model.apply_controlled_cycle(state, s_label, a_cycle, ALICE)
    transcript.append("send S alice->bob")
    state = model.send_register(state, s_label, ALICE, BOB, ledger, "send S alice->bob")
    transcript.append("bob controlled cycle")
    state = model.apply_controlled_cycle(state, s_label, b_cycle, BOB)
    if attach_flag:
        transcript.append("adjoin flag")
        state = model.adjoin(state, _flag_register(BOB, flag_label), "identification flag")
    transcript.append("bob coherent flag on S")
    state = model.coherent_flag(state, s_proj, [s_label], flag_label, BOB)
    transcript.append("bob inverse cycle")
    state = model.apply_controlled_cycle(state, s_label, b_cycle, BOB, inverse=True)
    transcript.append("send S bob->alice")
    state = model.send_register(state, s_label, BOB, ALICE, ledger, "send S bob->alice")
    transcript.append("alice inverse cycle")
    state = model.apply_controlled_cycle(state, s_label, a_cycle, ALICE, inverse=True)
    return state


def approx_measurement_budget(input_dim: int, pair_dim: int, m: int) -> int:
    return input_dim * pair_dim ** (m - 1) * m * 2


def run_approx_measurement(
    input_state: PureState,
    target: MeasurementTarget,
    m: int,
    s_label: str = "S",
    flag_label: str = "C",
    ledger: CommLedger | None = None,
    integral_qubits: bool = False,
) -> ProtocolResult:
    """Catalyst-assisted identification of the target state.

    Adjoins the catalyst copies and the control register internally, runs
    the eight-step circuit, and keeps every register in the output.  The
    ledger gains log2(m) qubits in each direction.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    _check_target_matches(input_state, target)
    pair_dim = target.alpha.total_dim
    d = target.d if target.d is not None else "?"
    model.check_budget(
        approx_measurement_budget(input_state.total_dim, pair_dim, m),
        f"approximate identification with d={d}, m={m}",
    )
    ledger = CommLedger(integral=integral_qubits) if ledger is None else ledger
    transcript = ["adjoin catalyst"]
    copy_labels = [(f"{target.a_label}{i}", f"{target.b_label}{i}") for i in range(2, m + 1)]
    state = model.adjoin(input_state, _catalyst_state(target, m, copy_labels), "catalyst")
    transcript.append("prepare S")
    state = model.adjoin(state, model.make_uniform_s(m, s_label, ALICE), "control register")
    pair_labels = [(target.a_label, target.b_label)] + copy_labels
    state = _ma_sequence(
        state, m, pair_labels, s_label, flag_label, ledger, transcript, attach_flag=True
    )
    return ProtocolResult(ledger=ledger, transcript=transcript, final_pure=state)


def run_w(
    input_state: PureState,
    d: int,
    m: int,
    mode: str = "approx",
    a_label: str = "A",
    b_label: str = "B",
    keep_pure: bool = False,
    integral_qubits: bool = False,
) -> ProtocolResult:
    """Simulate the entangled-swap gate by flag / phase / unflag.

    ``ideal`` mode uses the reference measurement twice and reproduces the
    gate exactly with zero communication.  ``approx`` mode uses the
    catalyst-assisted identification twice, costing 2 log2(m) qubits in
    each direction; ancillas, control and flag are discarded at the end,
    so the output is a density operator on the input registers.
    """
    if mode not in ("approx", "ideal"):
        raise ValueError(f"unknown mode {mode!r}")
    target = MeasurementTarget(model.make_phi_minus(d, a_label, b_label), d)
    _check_target_matches(input_state, target)
    kept = input_state.layout.labels
    ledger = CommLedger(integral=integral_qubits)
    transcript: list[str] = []
    flag_label, s_label = "C", "S"

    if mode == "ideal":
        res = run_ideal_measurement(input_state, target, flag_label)
        transcript += res.transcript
        state = res.final_pure
        transcript.append("phase on flag")
        state = model.apply_local(state, GateSpec("flag phase", DIAG_PHASE, (flag_label,), BOB))
        transcript.append("reverse coherent flag")
        alpha = target.alpha.amplitudes
        state = model.coherent_flag(
            state, np.outer(alpha, alpha.conj()), [a_label, b_label], flag_label, REFEREE
        )
        discard_labels = [flag_label]
    else:
        model.check_budget(
            approx_measurement_budget(input_state.total_dim, target.alpha.total_dim, m),
            f"gate simulation with d={d}, m={m}",
        )
        transcript.append("adjoin catalyst")
        copy_labels = [(f"{a_label}{i}", f"{b_label}{i}") for i in range(2, m + 1)]
        state = model.adjoin(input_state, _catalyst_state(target, m, copy_labels), "catalyst")
        transcript.append("prepare S")
        state = model.adjoin(state, model.make_uniform_s(m, s_label, ALICE), "control register")
        pair_labels = [(a_label, b_label)] + copy_labels
        state = _ma_sequence(
            state, m, pair_labels, s_label, flag_label, ledger, transcript, attach_flag=True
        )
        transcript.append("phase on flag")
        state = model.apply_local(state, GateSpec("flag phase", DIAG_PHASE, (flag_label,), BOB))
        state = _ma_sequence(
            state, m, pair_labels, s_label, flag_label, ledger, transcript, attach_flag=False
        )
        discard_labels = [l for pair in copy_labels for l in pair] + [s_label, flag_label]

    transcript.append("discard ancillas")
    density = model.discard(state, kept)
    return ProtocolResult(
        ledger=ledger,
        transcript=transcript,
        final_pure=state if keep_pure else None,
        final_density=density,
        kept_labels=kept,
    )


def exact_gate_action(input_state: PureState, gate: GateSpec) -> PureState:
    """Reference: the gate applied globally (analysis only)."""
    ref_gate = GateSpec(gate.name, gate.matrix, gate.targets, REFEREE)
    return model.apply_local(input_state, ref_gate)


def run_symmetric_test(
    alpha: PureState,
    beta: PureState,
    m: int,
    variant: str = "cyclic",
) -> float:
    """Probability that alpha^(m-1) (x) beta passes the permutation test.

    ``cyclic`` averages the m cyclic register permutations, ``full`` all m!
    of them (m <= 6); both equal 1/m + (1-1/m)|<alpha|beta>|^2.
    """
    if alpha.total_dim != beta.total_dim:
        raise ValueError("alpha and beta must have equal dimension")
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if variant == "cyclic":
        perms = [tuple((k + j) % m for k in range(m)) for j in range(m)]
    elif variant == "full":
        if m > 6:
            raise ValueError(f"full variant limited to m <= 6 (m! terms), got m={m}")
        perms = list(itertools.permutations(range(m)))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    vecs = [alpha.amplitudes] * (m - 1) + [beta.amplitudes]
    overlaps = np.array([[np.vdot(u, v) for v in vecs] for u in vecs])
    total = 0.0 + 0.0j
    for perm in perms:
        term = 1.0 + 0.0j
        for k in range(m):
            term *= overlaps[k][perm[k]]
        total += term
    prob = total / len(perms)
    if abs(prob.imag) > 1e-10:
        raise AssertionError(f"permutation-test probability came out complex: {prob}")
    return float(min(max(prob.real, 0.0), 1.0))


def _nontrivial_eigenpairs(gate: GateSpec, tol: float) -> list[tuple[complex, np.ndarray]]:
    """Eigenpairs with eigenvalue away from 1, via a unitary Schur form so
    the eigenbasis is orthonormal."""
    t, z = schur(gate.matrix, output="complex")
    off = np.max(np.abs(t - np.diag(np.diag(t))))
    if off > 1e-9:
        raise ValueError(f"gate {gate.name!r} is not normal enough to eigendecompose (off-diag {off:.2e})")
    pairs = []
    for i, lam in enumerate(np.diag(t)):
        if abs(lam - 1.0) > tol:
            pairs.append((complex(lam), z[:, i].copy()))
    lams = [lam for lam, _ in pairs]
    for i in range(len(lams)):
        for j in range(i + 1, len(lams)):
            if abs(lams[i] - lams[j]) < 1e-8:
                raise ValueError(
                    "degenerate nontrivial eigenvalues: the eigenbasis is not unique, "
                    "supply eigenpairs explicitly"
                )
    return pairs


def run_generalized_sim(
    gate: GateSpec,
    input_state: PureState,
    m_per_test: int,
    mode: str = "approx",
    eigenpairs: Sequence[tuple[complex, np.ndarray]] | None = None,
    eigen_tol: float = 1e-8,
    keep_pure: bool = False,
) -> ProtocolResult:
    """Simulate a bipartite gate with r nontrivial eigenvalues by testing
    the shared state against each flipped eigenvector in turn.

    Per eigenvector: identify (ideal or catalyst-assisted), apply
    Diag(lambda, 1) to the flag, reverse the identification.  The ledger
    grows to r * 2 log2(m) qubits per direction in approx mode.
    """
    if mode not in ("approx", "ideal"):
        raise ValueError(f"unknown mode {mode!r}")
    a_label, b_label = gate.targets
    ra = input_state.layout.register(a_label)
    rb = input_state.layout.register(b_label)
    if gate.matrix.shape[0] != ra.dim * rb.dim:
        raise ValueError("gate dimension does not match its target registers")
    pairs = list(eigenpairs) if eigenpairs is not None else _nontrivial_eigenpairs(gate, eigen_tol)

    kept = input_state.layout.labels
    ledger = CommLedger()
    transcript: list[str] = []
    state = input_state
    discard_labels: list[str] = []
    for t, (lam, vec) in enumerate(pairs, start=1):
        if abs(abs(lam) - 1.0) > 1e-9:
            raise ValueError(f"eigenvalue {lam} is not unimodular")
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        vec = vec / np.linalg.norm(vec)
        target = MeasurementTarget(
            PureState(
                RegisterLayout(
                    (Register(a_label, ra.dim, ra.owner), Register(b_label, rb.dim, rb.owner))
                ),
                vec,
            ),
            d=ra.dim - 1,
        )
        flag_label = f"C{t}"
        s_label = f"S{t}"
        phase_gate = GateSpec(f"eigenphase {t}", np.diag([lam, 1.0]).astype(complex), (flag_label,), BOB)
        transcript.append(f"test eigenvector {t}")
        if mode == "ideal":
            proj = np.outer(vec, vec.conj())
            state = model.adjoin(state, _flag_register(BOB, flag_label), "eigentest flag")
            state = model.coherent_flag(state, proj, [a_label, b_label], flag_label, REFEREE)
            state = model.apply_local(state, phase_gate)
            state = model.coherent_flag(state, proj, [a_label, b_label], flag_label, REFEREE)
            discard_labels.append(flag_label)
        else:
            model.check_budget(
                approx_measurement_budget(state.total_dim, target.alpha.total_dim, m_per_test),
                f"eigenvector test {t} with m={m_per_test}",
            )
            copy_labels = [(f"{a_label}.{t}.{i}", f"{b_label}.{t}.{i}") for i in range(2, m_per_test + 1)]
            state = model.adjoin(state, _catalyst_state(target, m_per_test, copy_labels), "catalyst")
            state = model.adjoin(state, model.make_uniform_s(m_per_test, s_label, ALICE), "control register")
            pair_labels = [(a_label, b_label)] + copy_labels
            state = _ma_sequence(
                state, m_per_test, pair_labels, s_label, flag_label, ledger, transcript, True
            )
            state = model.apply_local(state, phase_gate)
            state = _ma_sequence(
                state, m_per_test, pair_labels, s_label, flag_label, ledger, transcript, False
            )
            discard_labels += [l for pair in copy_labels for l in pair] + [s_label, flag_label]

    transcript.append("discard ancillas")
    density = state.density(kept)
    return ProtocolResult(
        ledger=ledger,
        transcript=transcript,
        final_pure=state if keep_pure else None,
        final_density=density,
        kept_labels=kept,
    )


def run_kparty_measurement(
    input_state: PureState,
    target: PureState,
    m: int,
    s_label: str = "S",
    flag_label: str = "C",
) -> ProtocolResult:
    """k-party identification: one party prepares the control register,
    which is circulated through every party (each cycling its own shares
    of the m copies), flagged by the last party, then circulated back.

    Every hop of the control register is charged to the ledger; outbound
    hops count as forward, the return as backward.  For k=2 this is
    exactly the bipartite protocol.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    share_regs = target.layout.registers
    k = len(share_regs)
    if k < 2:
        raise ValueError("k-party target needs at least two registers")
    parties = [r.owner for r in share_regs]
    if len(set(parties)) != k:
        raise ValueError(f"target registers must have distinct owners, got {parties}")
    for reg in share_regs:
        have = input_state.layout.register(reg.label)
        if have.dim != reg.dim:
            raise ValueError(f"register {reg.label!r} dimension mismatch with target")
    model.check_budget(
        input_state.total_dim * target.total_dim ** (m - 1) * m * 2,
        f"{k}-party identification with m={m}",
    )

    ledger = CommLedger()
    transcript = ["adjoin catalyst"]
    copy_labels = [tuple(f"{r.label}{i}" for r in share_regs) for i in range(2, m + 1)]
    regs: list[Register] = []
    amps = np.array([1.0], dtype=complex)
    for labels in copy_labels:
        for lbl, reg in zip(labels, share_regs):
            regs.append(Register(lbl, reg.dim, reg.owner))
        amps = np.kron(amps, target.amplitudes)
    state = model.adjoin(input_state, PureState(RegisterLayout(tuple(regs)), amps), "catalyst")
    transcript.append("prepare S")
    state = model.adjoin(state, model.make_uniform_s(m, s_label, parties[0]), "control register")

    cycles = [
        [share_regs[i].label] + [labels[i] for labels in copy_labels] for i in range(k)
    ]
    s_vec = model.make_uniform_s(m).amplitudes
    s_proj = np.outer(s_vec, s_vec.conj())

    for i, party in enumerate(parties):
        transcript.append(f"{party} controlled cycle")
        state = model.apply_controlled_cycle(state, s_label, cycles[i], party)
        if i + 1 < k:
            transcript.append(f"send S {party}->{parties[i + 1]}")
            state = model.send_register(
                state, s_label, party, parties[i + 1], ledger,
                f"send S {party}->{parties[i + 1]}", direction="forward",
            )
    transcript.append("adjoin flag")
    state = model.adjoin(state, _flag_register(parties[-1], flag_label), "identification flag")
    transcript.append(f"{parties[-1]} coherent flag on S")
    state = model.coherent_flag(state, s_proj, [s_label], flag_label, parties[-1])
    for i in range(k - 1, -1, -1):
        party = parties[i]
        transcript.append(f"{party} inverse cycle")
        state = model.apply_controlled_cycle(state, s_label, cycles[i], party, inverse=True)
        if i > 0:
            transcript.append(f"send S {party}->{parties[i - 1]}")
            state = model.send_register(
                state, s_label, party, parties[i - 1], ledger,
                f"send S {party}->{parties[i - 1]}", direction="backward",
            )
    return ProtocolResult(ledger=ledger, transcript=transcript, final_pure=state)
