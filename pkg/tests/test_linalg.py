import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocalsim import linalg, model
from nonlocalsim.linalg import DensityOperator, Ensemble


def haar(dim, rng):
    return linalg.random_pure_vector(dim, rng)


# ---------------------------------------------------------------------------
# tensor product
# ---------------------------------------------------------------------------


def test_tensor_product_identity():
    assert np.allclose(linalg.tensor_product(np.eye(2), np.eye(2)), np.eye(4))


def test_tensor_product_basis_vaccum():
    zero = model.basis_vector(2, 0)
    out = linalg.tensor_product(zero, zero)
    assert out[0] == 1.0 and np.count_nonzero(out) == 1


def test_tensor_product_index_arithmetic_oracle():
    # (X (x) I)|00>: independent index oracle says |ab> sits at a*2+b,
    # so the image must be the basis vector at index 1*2+0
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    state00 = linalg.tensor_product(model.basis_vector(2, 0), model.basis_vector(2, 0))
    out = linalg.tensor_product(x, np.eye(2)) @ state00
    expected_index = 1 * 2 + 0
    expected = np.zeros(4, dtype=complex)
    expected[expected_index] = 1.0
    assert np.allclose(out, expected)


def test_tensor_product_kind_mismatch():
    with pytest.raises(ValueError):
        linalg.tensor_product(np.eye(2), np.ones(2))


# ---------------------------------------------------------------------------
# partial trace / reduced density
# ---------------------------------------------------------------------------


def brute_force_partial_trace(mat, dims, keep):
    """Independent oracle: explicit loops over matrix elements."""
    rest = [i for i in range(len(dims)) if i not in keep]
    keep_dims = [dims[k] for k in keep]
    out = np.zeros((int(np.prod(keep_dims)), int(np.prod(keep_dims))), dtype=complex)
    for row in range(mat.shape[0]):
        for col in range(mat.shape[1]):
            rdig = list(np.unravel_index(row, dims))
            cdig = list(np.unravel_index(col, dims))
            if any(rdig[t] != cdig[t] for t in rest):
                continue
            ri = np.ravel_multi_index([rdig[k] for k in keep], keep_dims)
            ci = np.ravel_multi_index([cdig[k] for k in keep], keep_dims)
            out[ri, ci] += mat[row, col]
    return out


def test_partial_trace_maximally_entangled():
    phi = model.make_phi(2)
    rho = DensityOperator.from_pure(phi.amplitudes, (3, 3))
    reduced = linalg.partial_trace(rho, [0])
    assert np.allclose(reduced.matrix, np.diag([0.0, 0.5, 0.5]), atol=1e-12)


def test_partial_trace_product_state():
    rng = np.random.default_rng(0)
    a, b = haar(3, rng), haar(4, rng)
    rho = DensityOperator.from_pure(np.kron(a, b), (3, 4))
    reduced = linalg.partial_trace(rho, [1])
    assert np.allclose(reduced.matrix, np.outer(b, b.conj()), atol=1e-12)


def test_partial_trace_flipped_eigenvector_brute_force():
    pm = model.make_phi_minus(2)
    rho = DensityOperator.from_pure(pm.amplitudes, (3, 3))
    reduced = linalg.partial_trace(rho, [0])
    oracle = brute_force_partial_trace(rho.matrix, (3, 3), [0])
    assert np.allclose(reduced.matrix, oracle, atol=1e-12)
    spectrum = np.sort(np.linalg.eigvalsh(reduced.matrix))[::-1]
    assert np.allclose(spectrum, [0.5, 0.25, 0.25], atol=1e-9)


def test_partial_trace_random_vs_brute_force():
    rng = np.random.default_rng(1)
    rho = linalg.random_density_matrix((2, 3, 2), rng)
    for keep in ([0], [1], [2], [0, 2], [2, 0]):
        got = linalg.partial_trace(rho, keep)
        want = brute_force_partial_trace(rho.matrix, (2, 3, 2), keep)
        assert np.allclose(got.matrix, want, atol=1e-10), keep


def test_partial_trace_composes_to_full_trace():
    rng = np.random.default_rng(2)
    rho = linalg.random_density_matrix((2, 2, 3), rng)
    step = linalg.partial_trace(rho, [0, 1])
    step = linalg.partial_trace(step, [0])
    assert abs(np.trace(step.matrix) - 1.0) < 1e-10


def test_partial_trace_bad_index():
    rho = linalg.random_density_matrix((2, 2), np.random.default_rng(3))
    with pytest.raises(IndexError):
        linalg.partial_trace(rho, [5])
    with pytest.raises(ValueError):
        linalg.partial_trace(rho, [])


def test_reduced_density_matches_partial_trace():
    rng = np.random.default_rng(4)
    psi = haar(24, rng)
    rho = DensityOperator.from_pure(psi, (2, 3, 4))
    a = linalg.reduced_density(psi, (2, 3, 4), [1])
    b = linalg.partial_trace(rho, [1])
    assert np.allclose(a.matrix, b.matrix, atol=1e-10)


# ---------------------------------------------------------------------------
# schmidt spectrum
# ---------------------------------------------------------------------------


def test_schmidt_maximally_entangled():
    phi = model.make_phi(4)
    spec = linalg.schmidt_spectrum(phi.amplitudes, (5, 5), [0])
    assert np.allclose(spec, [0.25] * 4, atol=1e-12)


def test_schmidt_product_state():
    rng = np.random.default_rng(5)
    psi = np.kron(haar(3, rng), haar(3, rng))
    spec = linalg.schmidt_spectrum(psi, (3, 3), [0])
    assert np.allclose(spec, [1.0], atol=1e-10)


@pytest.mark.parametrize("d", [2, 3])
def test_schmidt_rank_2d_superposition(d):
    # (|Phi>|00> + |00>|Phi>)/sqrt(2) across the cut (A,A') vs (B,B')
    # is maximally entangled of rank 2d
    n = d + 1
    phi = model.make_phi(d).amplitudes
    zero = np.zeros(n * n, dtype=complex)
    zero[0] = 1.0
    psi = (np.kron(phi, zero) + np.kron(zero, phi)) / np.sqrt(2)
    # factors (A,B,A',B'): reorder the cut to (A, A')
    spec = linalg.schmidt_spectrum(psi, (n, n, n, n), [0, 2])
    assert len(spec) == 2 * d
    assert np.allclose(spec, [1.0 / (2 * d)] * (2 * d), atol=1e-9)


def test_schmidt_requires_proper_cut():
    with pytest.raises(ValueError):
        linalg.schmidt_spectrum(np.ones(4) / 2, (2, 2), [0, 1])


# ---------------------------------------------------------------------------
# entropies
# ---------------------------------------------------------------------------


def test_entropy_maximally_mixed_qubit():
    rho = DensityOperator(np.eye(2) / 2, (2,))
    assert abs(linalg.von_neumann_entropy(rho) - 1.0) < 1e-12


def test_entropy_pure_state():
    rho = DensityOperator.from_pure(np.array([1, 0, 0]), (3,))
    assert linalg.von_neumann_entropy(rho) < 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_entropy_reduced_maximally_entangled(d):
    phi = model.make_phi(d)
    rho = linalg.reduced_density(phi.amplitudes, (d + 1, d + 1), [0])
    assert abs(linalg.von_neumann_entropy(rho) - np.log2(d)) < 1e-9


def test_entropy_equal_on_both_sides_of_pure_state():
    rng = np.random.default_rng(6)
    for _ in range(10):
        psi = haar(12, rng)
        ha = linalg.von_neumann_entropy(linalg.reduced_density(psi, (3, 4), [0]))
        hb = linalg.von_neumann_entropy(linalg.reduced_density(psi, (3, 4), [1]))
        assert abs(ha - hb) < 1e-9


# ---------------------------------------------------------------------------
# trace distance
# ---------------------------------------------------------------------------


def test_trace_distance_identical_and_orthogonal():
    a = DensityOperator.from_pure(np.array([1, 0]), (2,))
    b = DensityOperator.from_pure(np.array([0, 1]), (2,))
    assert linalg.trace_distance(a, a) < 1e-12
    assert abs(linalg.trace_distance(a, b) - 1.0) < 1e-12


def test_trace_distance_pure_overlap_formula():
    rng = np.random.default_rng(7)
    for _ in range(20):
        u, v = haar(5, rng), haar(5, rng)
        x = abs(np.vdot(u, v))
        got = linalg.trace_distance(
            DensityOperator.from_pure(u, (5,)), DensityOperator.from_pure(v, (5,))
        )
        assert abs(got - np.sqrt(1 - x**2)) < 1e-9


def test_trace_distance_triangle_inequality():
    rng = np.random.default_rng(8)
    for _ in range(25):
        a = linalg.random_density_matrix((4,), rng)
        b = linalg.random_density_matrix((4,), rng)
        c = linalg.random_density_matrix((4,), rng)
        assert linalg.trace_distance(a, c) <= (
            linalg.trace_distance(a, b) + linalg.trace_distance(b, c) + 1e-10
        )


def test_trace_distance_dim_mismatch():
    a = DensityOperator.from_pure(np.array([1, 0]), (2,))
    b = DensityOperator.from_pure(np.array([1, 0, 0]), (3,))
    with pytest.raises(ValueError):
        linalg.trace_distance(a, b)


# ---------------------------------------------------------------------------
# binary entropy
# ---------------------------------------------------------------------------


def test_binary_entropy_values():
    assert linalg.binary_entropy(0.5) == pytest.approx(1.0, abs=1e-12)
    assert linalg.binary_entropy(0.0) == 0.0
    assert linalg.binary_entropy(1.0) == 0.0
    # value frozen from a 50-digit mpmath evaluation of -x log2 x - (1-x) log2 (1-x)
    assert linalg.binary_entropy(0.25) == pytest.approx(0.8112781244591328, abs=1e-12)


def test_binary_entropy_domain():
    with pytest.raises(ValueError):
        linalg.binary_entropy(-0.1)
    with pytest.raises(ValueError):
        linalg.binary_entropy(1.1)


def test_binary_entropy_sqrt_bound_grid():
    xs = np.linspace(0.0, 1.0, 1000)
    hs = np.array([linalg.binary_entropy(float(x)) for x in xs])
    assert np.all(hs <= 2.0 * np.sqrt(xs) + 1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_binary_entropy_sqrt_bound_property(x):
    assert linalg.binary_entropy(x) <= 2.0 * np.sqrt(x) + 1e-12


# ---------------------------------------------------------------------------
# conditional entropy
# ---------------------------------------------------------------------------


def test_conditional_entropy_product_with_mixed_qubit():
    rng = np.random.default_rng(9)
    z = linalg.random_density_matrix((3,), rng)
    rho = DensityOperator(np.kron(np.eye(2) / 2, z.matrix), (2, 3))
    assert abs(linalg.conditional_entropy(rho, [0]) - 1.0) < 1e-9


def test_conditional_entropy_bell_state():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = DensityOperator.from_pure(bell, (2, 2))
    assert abs(linalg.conditional_entropy(rho, [0]) - (-1.0)) < 1e-9


def test_conditional_entropy_classically_correlated():
    rho = DensityOperator(np.diag([0.5, 0, 0, 0.5]).astype(complex), (2, 2))
    assert abs(linalg.conditional_entropy(rho, [0])) < 1e-9


def test_conditional_entropy_needs_conditioning_system():
    rho = DensityOperator(np.eye(2) / 2, (2,))
    with pytest.raises(ValueError):
        linalg.conditional_entropy(rho, [0])


# ---------------------------------------------------------------------------
# Holevo information
# ---------------------------------------------------------------------------


def test_holevo_orthogonal_uniform():
    members = tuple(
        (0.25, DensityOperator.from_pure(model.basis_vector(4, i), (4,))) for i in range(4)
    )
    assert abs(linalg.holevo_information(Ensemble(members)) - 2.0) < 1e-9


def test_holevo_identical_members():
    rho = DensityOperator(np.eye(2) / 2, (2,))
    ens = Ensemble(((0.3, rho), (0.7, rho)))
    assert abs(linalg.holevo_information(ens)) < 1e-12


def test_holevo_two_pure_states_overlap():
    # eigenvalues of the average of two pure states at overlap x are
    # (1 +/- x)/2, so chi = H2((1+x)/2); entropy oracle computed inline
    psi0 = np.array([1, 0], dtype=complex)
    psi1 = np.array([1, 1], dtype=complex) / np.sqrt(2)
    x = abs(np.vdot(psi0, psi1))
    ens = Ensemble(
        ((0.5, DensityOperator.from_pure(psi0, (2,))), (0.5, DensityOperator.from_pure(psi1, (2,))))
    )
    avg = 0.5 * (np.outer(psi0, psi0.conj()) + np.outer(psi1, psi1.conj()))
    eigs = np.linalg.eigvalsh(avg)
    oracle = -sum(e * np.log2(e) for e in eigs if e > 1e-15)
    got = linalg.holevo_information(ens)
    assert got == pytest.approx(oracle, abs=1e-10)
    assert abs(eigs[-1] - (1 + x) / 2) < 1e-12
    assert got == pytest.approx(0.600876, abs=1e-6)


def test_holevo_on_subsystem():
    # label written into factor 0, factor 1 maximally mixed and uncorrelated
    rng = np.random.default_rng(10)
    noise = np.eye(2) / 2
    members = tuple(
        (0.5, DensityOperator(np.kron(np.outer(v, v.conj()), noise), (2, 2)))
        for v in (np.array([1, 0]), np.array([0, 1]))
    )
    ens = Ensemble(members)
    assert abs(linalg.holevo_information(ens, [0]) - 1.0) < 1e-9
    assert abs(linalg.holevo_information(ens, [1])) < 1e-9


def test_ensemble_validation():
    rho = DensityOperator(np.eye(2) / 2, (2,))
    with pytest.raises(ValueError):
        Ensemble(((0.5, rho),))
    with pytest.raises(ValueError):
        Ensemble(())


# ---------------------------------------------------------------------------
# density operator validation
# ---------------------------------------------------------------------------


def test_density_operator_rejects_bad_inputs():
    with pytest.raises(ValueError):
        DensityOperator(np.eye(2), (2,))  # trace 2
    with pytest.raises(ValueError):
        DensityOperator(np.array([[0.5, 0.5], [-0.5, 0.5]]), (2,))  # not Hermitian
    with pytest.raises(ValueError):
        DensityOperator(np.diag([1.5, -0.5]).astype(complex), (2,))  # negative eigenvalue
    with pytest.raises(ValueError):
        DensityOperator(np.eye(2) / 2, (3,))  # dims mismatch


def test_random_density_matrix_is_valid():
    rng = np.random.default_rng(11)
    rho = linalg.random_density_matrix((2, 3), rng, rank=2)
    assert rho.dims == (2, 3)
    assert abs(np.trace(rho.matrix) - 1.0) < 1e-12
