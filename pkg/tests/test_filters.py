import numpy as np

from diracsp import (
    FilterSpec,
    NumericalError,
    apply_filter,
    assemble_dirac,
    build_complex,
    build_regularizer,
    compute_basis,
    decompose_signal,
    frequency_response,
)

from support import corpus, raises


def test_spec_validation():
    FilterSpec(variant=1, z=0.95, gamma=0.0)
    assert raises(ValueError, FilterSpec, variant=3)
    assert raises(ValueError, FilterSpec, z=1.0)
    assert raises(ValueError, FilterSpec, z=-1.2)
    assert raises(ValueError, FilterSpec, gamma=-0.1)
    assert raises(ValueError, FilterSpec, gamma=float("nan"))
    # custom coefficients lift the |z| < 1 requirement
    FilterSpec(d1_coeffs=(0.0, 1.0), z=5.0)


def test_uncoupled_regularizer_is_block_diagonal():
    c = corpus()[1]
    op = assemble_dirac(c)
    n, e, t = op.block_dims
    Q = build_regularizer(op, FilterSpec(variant=1, z=0.0))
    D1 = op.D1.toarray()
    assert np.abs(Q - D1 @ D1).max() <= 1e-12
    assert np.abs(Q[:n, :n] - op.L0.toarray()).max() <= 1e-12
    down = op.B1.T @ op.B1
    assert np.abs(Q[n:n + e, n:n + e] - down.toarray()).max() <= 1e-12
    assert np.abs(Q[n + e:, :]).max() == 0.0
    assert np.abs(Q[:n, n:]).max() == 0.0


def test_regularizer_acts_as_polynomial_on_eigenvectors():
    c = corpus()[2]
    op = assemble_dirac(c)
    basis = compute_basis(op)
    for variant, z in ((1, 0.7), (2, -0.4)):
        Q = build_regularizer(op, FilterSpec(variant=variant, z=z))
        cols = basis.phi1 if variant == 1 else basis.phi2
        lams = np.concatenate([basis.svd1[1], -basis.svd1[1]]) if variant == 1 else \
            np.concatenate([basis.svd2[1], -basis.svd2[1]])
        for j in range(cols.shape[1]):
            lam = lams[j]
            expected = (lam ** 2 - z * lam ** 3) * cols[:, j]
            assert np.linalg.norm(Q @ cols[:, j] - expected) <= 1e-10


def test_regularizer_positive_semidefinite_near_unit_coupling():
    for c in corpus()[:3]:
        op = assemble_dirac(c)
        for variant in (1, 2):
            for z in (0.95, -0.95):
                Q = build_regularizer(op, FilterSpec(variant=variant, z=z))
                assert np.linalg.eigvalsh(Q).min() >= -1e-10


def test_custom_coefficients_match_standard_form():
    op = assemble_dirac(corpus()[0])
    z = 0.5
    Q_std = build_regularizer(op, FilterSpec(variant=1, z=z))
    Q_gen = build_regularizer(op, FilterSpec(d1_coeffs=(0.0, 1.0, -z)))
    assert np.abs(Q_std - Q_gen).max() <= 1e-12


def test_indefinite_custom_coefficients_rejected():
    op = assemble_dirac(corpus()[0])
    assert raises(NumericalError, build_regularizer, op, FilterSpec(d1_coeffs=(0.0, -1.0)))
    assert raises(NumericalError, apply_filter, op,
                  FilterSpec(d2_coeffs=(0.0, -2.0), gamma=1.0), np.ones(op.total_dim))


def test_gamma_zero_is_identity():
    op = assemble_dirac(corpus()[1])
    rng = np.random.default_rng(0)
    x = rng.standard_normal(op.total_dim)
    out = apply_filter(op, FilterSpec(variant=1, z=0.5, gamma=0.0), x)
    assert np.array_equal(out.s_hat.to_vector(), x)
    assert out.solve_residual <= 1e-12


def test_harmonic_signals_pass_unchanged():
    c = corpus()[2]
    op = assemble_dirac(c)
    basis = compute_basis(op)
    rng = np.random.default_rng(9)
    h = basis.phi_harm @ rng.standard_normal(basis.harmonic_dim)
    for variant, z, gamma in ((1, -0.95, 100.0), (2, 0.95, 3.63), (1, 0.0, 1.0)):
        out = apply_filter(op, FilterSpec(variant=variant, z=z, gamma=gamma), h)
        assert np.linalg.norm(out.s_hat.to_vector() - h) <= 1e-10


def test_solve_matches_closed_form_on_eigenvectors():
    c = corpus()[3]
    op = assemble_dirac(c)
    basis = compute_basis(op)
    spec = FilterSpec(variant=1, z=-0.95, gamma=2.82)
    lams = np.concatenate([basis.svd1[1], -basis.svd1[1]])
    cols = basis.phi1
    for j in range(cols.shape[1]):
        out = apply_filter(op, spec, cols[:, j]).s_hat.to_vector()
        expected = frequency_response(spec, lams[j]) * cols[:, j]
        assert np.linalg.norm(out - expected) <= 1e-8


def test_optimality_residual_on_random_inputs():
    c = corpus()[4]
    op = assemble_dirac(c)
    rng = np.random.default_rng(7)
    for _ in range(10):
        x = rng.standard_normal(op.total_dim)
        gamma = float(10 ** rng.uniform(-2, 2))
        z = float(rng.uniform(-0.99, 0.99))
        variant = int(rng.integers(1, 3))
        spec = FilterSpec(variant=variant, z=z, gamma=gamma)
        out = apply_filter(op, spec, x)
        Q = build_regularizer(op, spec)
        M = np.eye(op.total_dim) + gamma * Q
        s_hat = out.s_hat.to_vector()
        assert np.linalg.norm(M @ s_hat - x) <= 1e-8 * np.linalg.norm(x)
        # the regularization energy never increases
        assert s_hat @ Q @ s_hat <= x @ Q @ x + 1e-8


def test_filtering_one_part_leaves_the_other_image_unchanged():
    c = corpus()[2]
    op = assemble_dirac(c)
    basis = compute_basis(op)
    rng = np.random.default_rng(11)
    x = rng.standard_normal(op.total_dim)
    before = decompose_signal(basis, x)
    out = apply_filter(op, FilterSpec(variant=1, z=-0.8, gamma=5.0), x)
    after = decompose_signal(basis, out.s_hat)
    assert np.linalg.norm(after.s2.to_vector() - before.s2.to_vector()) <= 1e-8
    out2 = apply_filter(op, FilterSpec(variant=2, z=0.8, gamma=5.0), x)
    after2 = decompose_signal(basis, out2.s_hat)
    assert np.linalg.norm(after2.s1.to_vector() - before.s1.to_vector()) <= 1e-8


def test_apply_filter_rejects_bad_lengths():
    op = assemble_dirac(build_complex([(0, 1, 2)]))
    assert raises(ValueError, apply_filter, op, FilterSpec(), np.zeros(5))


def test_frequency_response_values():
    assert frequency_response(FilterSpec(variant=1, z=0.5, gamma=2.0), 0.0) == 1.0
    spec = FilterSpec(variant=1, z=0.0, gamma=1.7)
    assert frequency_response(spec, 0.6) == frequency_response(spec, -0.6)
    anti = FilterSpec(variant=1, z=-0.95, gamma=2.82)
    assert frequency_response(anti, -1.0) > frequency_response(anti, 1.0)
    assert abs(frequency_response(anti, -1.0) - 1.0 / (1.0 + 2.82 * 0.05)) <= 1e-12
    assert abs(frequency_response(anti, 1.0) - 1.0 / (1.0 + 2.82 * 1.95)) <= 1e-12
    # z-reflection symmetry
    for z, lam in ((0.3, 0.7), (-0.9, 0.2), (0.5, -1.0)):
        a = frequency_response(FilterSpec(variant=1, z=z, gamma=2.0), lam)
        b = frequency_response(FilterSpec(variant=1, z=-z, gamma=2.0), -lam)
        assert abs(a - b) <= 1e-12
    grid = frequency_response(anti, np.array([-1.0, 0.0, 1.0]))
    assert grid.shape == (3,) and grid[1] == 1.0


def test_frequency_response_with_custom_coefficients():
    spec = FilterSpec(variant=1, gamma=2.0, d1_coeffs=(0.0, 1.0, -0.5))
    ref = FilterSpec(variant=1, z=0.5, gamma=2.0)
    for lam in (-1.0, -0.3, 0.4, 1.0):
        assert abs(frequency_response(spec, lam) - frequency_response(ref, lam)) <= 1e-12
