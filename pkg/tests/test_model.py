import numpy as np
import pytest

from nonlocalsim import linalg, model
from nonlocalsim.model import (
    ALICE,
    BOB,
    REFEREE,
    BudgetError,
    CommLedger,
    GateSpec,
    LocalityError,
    PureState,
    Register,
    RegisterLayout,
)


def two_qudit_layout(d, owner_a=ALICE, owner_b=BOB):
    return RegisterLayout((Register("A", d + 1, owner_a), Register("B", d + 1, owner_b)))


def random_state(layout, seed):
    rng = np.random.default_rng(seed)
    return PureState(layout, linalg.random_pure_vector(layout.total_dim, rng))


# ---------------------------------------------------------------------------
# resource states
# ---------------------------------------------------------------------------


def test_make_phi_d1_is_11():
    phi = model.make_phi(1)
    assert np.allclose(phi.amplitudes, [0, 0, 0, 1])


def test_make_phi_d2_amplitudes():
    phi = model.make_phi(2)
    expected = np.zeros(9)
    expected[4] = expected[8] = 1 / np.sqrt(2)
    assert np.allclose(phi.amplitudes, expected)


def test_make_phi_avoids_level_zero():
    phi = model.make_phi(3)
    grid = phi.amplitudes.reshape(4, 4)
    assert np.allclose(grid[0, :], 0) and np.allclose(grid[:, 0], 0)


def test_make_phi_schmidt_spectrum():
    for d in (1, 2, 3):
        spec = linalg.schmidt_spectrum(model.make_phi(d).amplitudes, (d + 1, d + 1), [0])
        assert np.allclose(spec, [1 / d] * d, atol=1e-12)


def test_make_phi_rejects_bad_d():
    with pytest.raises(ValueError):
        model.make_phi(0)


def test_make_phi_minus_d1():
    pm = model.make_phi_minus(1)
    assert np.allclose(pm.amplitudes, [-1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)])


def test_phi_minus_overlap_with_phi():
    for d in (1, 2, 4):
        ov = np.vdot(model.make_phi(d).amplitudes, model.make_phi_minus(d).amplitudes)
        assert abs(ov - 1 / np.sqrt(2)) < 1e-12


def test_gate_flips_phi_minus():
    for d in (1, 2, 3):
        u = model.make_gate_u(d)
        pm = model.make_phi_minus(d)
        out = model.apply_local(pm, u)
        assert np.allclose(out.amplitudes, -pm.amplitudes, atol=1e-12)


def test_gate_swaps_ground_and_entangled():
    for d in (1, 2):
        u = model.make_gate_u(d)
        phi = model.make_phi(d)
        ground = np.zeros((d + 1) ** 2)
        ground[0] = 1
        assert np.allclose(u.matrix @ ground, phi.amplitudes, atol=1e-12)
        assert np.allclose(u.matrix @ phi.amplitudes, ground, atol=1e-12)


def test_gate_fixes_untouched_basis_state():
    u = model.make_gate_u(2)
    e12 = np.zeros(9)
    e12[1 * 3 + 2] = 1
    assert np.allclose(u.matrix @ e12, e12)


def test_gate_spectrum_single_flip():
    for d in (1, 2, 3):
        eigs = np.sort(np.linalg.eigvalsh(model.make_gate_u(d).matrix))
        assert abs(eigs[0] + 1.0) < 1e-10
        assert np.allclose(eigs[1:], 1.0, atol=1e-10)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_gate_is_hermitian_involution(d):
    u = model.make_gate_u(d).matrix
    assert np.allclose(u, u.conj().T, atol=1e-12)
    assert np.allclose(u @ u, np.eye(u.shape[0]), atol=1e-12)


def test_uniform_control_state():
    s2 = model.make_uniform_s(2)
    assert np.allclose(s2.amplitudes, [1 / np.sqrt(2)] * 2)
    s4 = model.make_uniform_s(4)
    assert np.allclose(s4.amplitudes, [0.5] * 4)
    for j in range(4):
        assert abs(np.vdot(model.basis_vector(4, j), s4.amplitudes) - 0.5) < 1e-12
    with pytest.raises(ValueError):
        model.make_uniform_s(0)


# ---------------------------------------------------------------------------
# controlled cycle at the model level
# ---------------------------------------------------------------------------


def cycle_fixture(m, d=1, seed=0):
    regs = [Register("S", m, ALICE)]
    for i in range(m):
        regs.append(Register(f"A{i}", d + 1, ALICE))
    layout = RegisterLayout(tuple(regs))
    return random_state(layout, seed)


def test_cycle_control_zero_component_untouched():
    st = cycle_fixture(3)
    out = model.apply_controlled_cycle(st, "S", ["A0", "A1", "A2"], ALICE)
    a = st.amplitudes.reshape(st.layout.dims)
    b = out.amplitudes.reshape(st.layout.dims)
    assert np.allclose(a[0], b[0], atol=1e-14)


def test_cycle_m2_swaps_contents():
    # control value 1 with two registers: contents swap
    regs = (
        Register("S", 2, ALICE),
        Register("P", 3, ALICE),
        Register("Q", 3, ALICE),
    )
    amps = np.zeros(18, dtype=complex)
    amps[np.ravel_multi_index((1, 1, 2), (2, 3, 3))] = 1.0  # S=1, contents (1, 2)
    st = PureState(RegisterLayout(regs), amps)
    out = model.apply_controlled_cycle(st, "S", ["P", "Q"], ALICE)
    nz = np.flatnonzero(np.abs(out.amplitudes) > 1e-12)
    assert list(np.unravel_index(nz[0], (2, 3, 3))) == [1, 2, 1]


def test_cycle_forward_inverse_identity_on_random_states():
    for seed in range(100):
        st = cycle_fixture(3, seed=seed)
        fwd = model.apply_controlled_cycle(st, "S", ["A0", "A1", "A2"], ALICE)
        back = model.apply_controlled_cycle(fwd, "S", ["A0", "A1", "A2"], ALICE, inverse=True)
        assert np.allclose(back.amplitudes, st.amplitudes, atol=1e-10)


def test_cycle_ownership_enforced():
    regs = (
        Register("S", 2, ALICE),
        Register("P", 2, ALICE),
        Register("Q", 2, BOB),
    )
    st = PureState(RegisterLayout(regs), model.basis_vector(8, 0))
    with pytest.raises(LocalityError):
        model.apply_controlled_cycle(st, "S", ["P", "Q"], ALICE)


def test_split_cycle_composition_equals_global_cycle():
    # alice on her halves then bob on his equals the referee cycling pairs
    m, d = 3, 1
    regs = [Register("S", m, ALICE)]
    pair_labels = []
    for i in range(m):
        regs += [Register(f"A{i}", d + 1, ALICE), Register(f"B{i}", d + 1, BOB)]
        pair_labels.append((f"A{i}", f"B{i}"))
    layout = RegisterLayout(tuple(regs))
    st = random_state(layout, 5)

    stepwise = model.apply_controlled_cycle(st, "S", [a for a, _ in pair_labels], ALICE)
    stepwise = model.apply_controlled_cycle(stepwise, "S", [b for _, b in pair_labels], BOB)

    # global variant: cycle the pairs as fused registers, via referee on both halves
    fused = model.apply_controlled_cycle(st, "S", [a for a, _ in pair_labels], REFEREE)
    fused = model.apply_controlled_cycle(fused, "S", [b for _, b in pair_labels], REFEREE)
    assert np.allclose(stepwise.amplitudes, fused.amplitudes, atol=1e-12)


# ---------------------------------------------------------------------------
# coherent flag
# ---------------------------------------------------------------------------


def flag_fixture(vec, flag_owner=BOB):
    regs = (Register("T", len(vec), BOB), Register("C", 2, flag_owner))
    amps = np.kron(vec, model.basis_vector(2, 0))
    return PureState(RegisterLayout(regs), amps)


def test_flag_stays_zero_inside_subspace():
    v = np.array([1, 0, 0], dtype=complex)
    st = flag_fixture(v)
    out = model.coherent_flag(st, np.outer(v, v.conj()), ["T"], "C", BOB)
    assert np.allclose(out.amplitudes, st.amplitudes)


def test_flag_flips_outside_subspace():
    v = np.array([1, 0, 0], dtype=complex)
    w = np.array([0, 1, 0], dtype=complex)
    st = flag_fixture(w)
    out = model.coherent_flag(st, np.outer(v, v.conj()), ["T"], "C", BOB)
    assert np.allclose(out.amplitudes, np.kron(w, model.basis_vector(2, 1)))


def test_flag_is_involution():
    rng = np.random.default_rng(12)
    v = linalg.random_pure_vector(3, rng)
    proj = np.outer(v, v.conj())
    st = PureState(
        RegisterLayout((Register("T", 3, BOB), Register("C", 2, BOB))),
        linalg.random_pure_vector(6, rng),
    )
    twice = model.coherent_flag(model.coherent_flag(st, proj, ["T"], "C", BOB), proj, ["T"], "C", BOB)
    assert np.allclose(twice.amplitudes, st.amplitudes, atol=1e-12)


def test_flag_rejects_non_projector():
    st = flag_fixture(np.array([1, 0, 0], dtype=complex))
    with pytest.raises(ValueError):
        model.coherent_flag(st, 0.5 * np.eye(3), ["T"], "C", BOB)


def test_flag_ownership_and_qubit_checks():
    st = flag_fixture(np.array([1, 0, 0], dtype=complex), flag_owner=ALICE)
    proj = np.zeros((3, 3))
    proj[0, 0] = 1
    with pytest.raises(LocalityError):
        model.coherent_flag(st, proj, ["T"], "C", BOB)
    bad = PureState(
        RegisterLayout((Register("T", 3, BOB), Register("C", 3, BOB))),
        np.kron(np.array([1, 0, 0]), np.array([1, 0, 0])),
    )
    with pytest.raises(ValueError):
        model.coherent_flag(bad, proj, ["T"], "C", BOB)


# ---------------------------------------------------------------------------
# apply_local
# ---------------------------------------------------------------------------


def test_apply_local_phase_gate():
    st = PureState(RegisterLayout((Register("C", 2, BOB),)), model.basis_vector(2, 0))
    out = model.apply_local(st, GateSpec("phase", np.diag([-1, 1]).astype(complex), ("C",), BOB))
    assert np.allclose(out.amplitudes, [-1, 0])


def test_apply_local_identity():
    st = random_state(two_qudit_layout(2), 13)
    out = model.apply_local(st, GateSpec("id", np.eye(3), ("B",), BOB))
    assert np.allclose(out.amplitudes, st.amplitudes)


def test_apply_local_locality_violation():
    st = random_state(two_qudit_layout(1), 14)
    with pytest.raises(LocalityError):
        model.apply_local(st, GateSpec("x", np.array([[0, 1], [1, 0]]), ("B",), ALICE))


def test_apply_local_only_touches_targets():
    rng = np.random.default_rng(15)
    layout = RegisterLayout(
        (Register("A", 2, ALICE), Register("B", 2, BOB), Register("Z", 3, BOB))
    )
    st = PureState(layout, linalg.random_pure_vector(12, rng))
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    out = model.apply_local(st, GateSpec("h", h, ("B",), BOB))
    # reduced state on the untouched registers is unchanged
    assert np.allclose(
        st.density(["A", "Z"]).matrix, out.density(["A", "Z"]).matrix, atol=1e-10
    )


def test_gate_spec_requires_unitary():
    with pytest.raises(ValueError):
        GateSpec("bad", np.array([[1, 1], [0, 1]]), ("A",), ALICE)


# ---------------------------------------------------------------------------
# send_register and the ledger
# ---------------------------------------------------------------------------


def test_send_register_moves_ownership_and_charges():
    st = random_state(two_qudit_layout(3), 16)  # dims 4
    ledger = CommLedger()
    out = model.send_register(st, "A", ALICE, BOB, ledger, "step one")
    assert out.layout.owner("A") == BOB
    assert np.shares_memory(out.amplitudes, st.amplitudes) or np.allclose(
        out.amplitudes, st.amplitudes
    )
    assert ledger.forward_qubits == 2.0 and ledger.backward_qubits == 0.0
    back = model.send_register(out, "A", BOB, ALICE, ledger, "step two")
    assert ledger.backward_qubits == 2.0
    assert back.layout.owner("A") == ALICE


def test_send_register_contract_errors():
    st = random_state(two_qudit_layout(1), 17)
    ledger = CommLedger()
    with pytest.raises(LocalityError):
        model.send_register(st, "A", BOB, ALICE, ledger)
    with pytest.raises(ValueError):
        model.send_register(st, "A", ALICE, ALICE, ledger)


def test_ledger_totals_equal_event_sums():
    st = random_state(two_qudit_layout(3), 18)
    ledger = CommLedger()
    st = model.send_register(st, "A", ALICE, BOB, ledger)
    st = model.send_register(st, "B", BOB, ALICE, ledger)
    st = model.send_register(st, "A", BOB, ALICE, ledger)
    fwd = sum(e.qubits for e in ledger.events if e.direction == "forward")
    bwd = sum(e.qubits for e in ledger.events if e.direction == "backward")
    assert ledger.forward_qubits == fwd and ledger.backward_qubits == bwd
    assert ledger.classical_bits == 2 * (fwd + bwd)


def test_ledger_integral_mode_rounds_up():
    layout = RegisterLayout((Register("R", 3, ALICE),))
    st = PureState(layout, model.basis_vector(3, 0))
    exact, integral = CommLedger(), CommLedger(integral=True)
    model.send_register(st, "R", ALICE, BOB, exact)
    model.send_register(st, "R", ALICE, BOB, integral)
    assert exact.forward_qubits == pytest.approx(np.log2(3))
    assert integral.forward_qubits == 2.0


def test_party_rank_ordering():
    assert model.party_rank(ALICE) == 0
    assert model.party_rank(BOB) == 1
    assert model.party_rank("party3") == 2
    assert model.party_rank(REFEREE) is None


# ---------------------------------------------------------------------------
# adjoin / discard / budget
# ---------------------------------------------------------------------------


def test_adjoin_embeds_flag():
    st = random_state(two_qudit_layout(1), 19)
    flag = PureState(RegisterLayout((Register("C", 2, BOB),)), model.basis_vector(2, 0))
    out = model.adjoin(st, flag)
    assert out.layout.labels == ("A", "B", "C")
    grid = out.amplitudes.reshape(2, 2, 2)
    assert np.allclose(grid[:, :, 1], 0)
    assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-12


def test_adjoin_label_collision():
    st = random_state(two_qudit_layout(1), 20)
    with pytest.raises(ValueError):
        model.adjoin(st, random_state(two_qudit_layout(1), 21))


def test_budget_error_names_context(monkeypatch):
    monkeypatch.setenv("NONLOCALSIM_MAX_AMPLITUDES", "4")
    st = random_state(two_qudit_layout(1), 22)
    flag = PureState(RegisterLayout((Register("C", 2, BOB),)), model.basis_vector(2, 0))
    with pytest.raises(BudgetError) as err:
        model.adjoin(st, flag, context="d=1, m=77")
    assert "d=1, m=77" in str(err.value)
    assert "NONLOCALSIM_MAX_AMPLITUDES" in str(err.value)


def test_discard_returns_reduced_density():
    phi = model.make_phi(1)
    rho = model.discard(phi, ["A"])
    assert np.allclose(rho.matrix, np.diag([0, 1]), atol=1e-12)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def test_pure_state_norm_enforced():
    layout = RegisterLayout((Register("A", 2, ALICE),))
    with pytest.raises(ValueError):
        PureState(layout, np.array([1.0, 1.0]))


def test_layout_duplicate_labels():
    with pytest.raises(ValueError):
        RegisterLayout((Register("A", 2, ALICE), Register("A", 2, BOB)))


def test_layout_axis_lookup():
    layout = two_qudit_layout(1)
    assert layout.axis("B") == 1
    with pytest.raises(KeyError):
        layout.axis("Z")


def test_norm_preserved_through_protocol_ops():
    st = random_state(two_qudit_layout(2), 23)
    ledger = CommLedger()
    st = model.apply_local(st, GateSpec("u", model.make_gate_u(2).matrix, ("A", "B"), REFEREE))
    st = model.send_register(st, "A", ALICE, BOB, ledger)
    st = model.adjoin(st, PureState(RegisterLayout((Register("C", 2, BOB),)), model.basis_vector(2, 0)))
    assert abs(np.linalg.norm(st.amplitudes) - 1.0) < 1e-9
