import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dualframe import corpus
from dualframe.errors import DimensionError, IncompleteSum, InvalidPovm, InvalidState, NotHermitian, NotPositive
from dualframe.hs import (
    PAULI_X,
    PAULI_Z,
    born_probabilities,
    density_matrix,
    hs_inner,
    is_informationally_complete,
    make_ensemble,
    project_onto_span,
    span_basis,
    validate_povm,
)


def test_hs_inner_examples():
    assert hs_inner(np.eye(2), np.eye(2)) == 2
    assert hs_inner(PAULI_Z, PAULI_X) == 0
    assert hs_inner(PAULI_Z, PAULI_Z) == 2


def test_hs_inner_dimension_mismatch():
    with pytest.raises(DimensionError):
        hs_inner(np.eye(2), np.eye(3))


def test_hs_inner_conjugate_symmetric(rng):
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert hs_inner(a, b) == pytest.approx(np.conj(hs_inner(b, a)))
    assert hs_inner(a, b) == pytest.approx(np.trace(a.conj().T @ b))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=4, max_size=4))
def test_hs_norm_positive(entries):
    a = np.array(entries).reshape(2, 2)
    v = hs_inner(a, a)
    assert abs(v.imag) < 1e-12 and v.real >= 0
    assert v.real == pytest.approx(np.sum(np.abs(a) ** 2))
    if not np.any(a):
        assert v == 0


def test_projective_povm_valid():
    povm = validate_povm([np.diag([1, 0]), np.diag([0, 1])])
    assert povm.n_outcomes == 2 and povm.dim == 2


def test_incomplete_sum_reports_deviation():
    with pytest.raises(InvalidPovm) as info:
        validate_povm([np.diag([1, 0]), np.diag([0, 0.9])])
    (v,) = info.value.violations
    assert isinstance(v, IncompleteSum)
    assert v.deviation == pytest.approx(0.1)


def test_validation_is_exhaustive():
    bad = [np.array([[1, 1], [0, 0]]), np.diag([-0.5, 1.0])]
    with pytest.raises(InvalidPovm) as info:
        validate_povm(bad)
    kinds = {type(v) for v in info.value.violations}
    assert kinds == {NotHermitian, NotPositive, IncompleteSum}
    negative = [v for v in info.value.violations if isinstance(v, NotPositive)]
    by_index = {v.index: v.min_eigenvalue for v in negative}
    assert by_index[1] == pytest.approx(-0.5)


def test_mixed_dimensions_rejected():
    with pytest.raises(DimensionError):
        validate_povm([np.eye(2), np.eye(3)])


def test_tetrahedron_directions():
    s = corpus.TETRAHEDRON
    np.testing.assert_allclose(s.sum(axis=0), 0, atol=1e-15)
    np.testing.assert_allclose(s.T @ s, 4 / 3 * np.eye(3), atol=1e-15)
    for p in corpus.tetrahedron_povm().elements:
        np.testing.assert_allclose(np.linalg.eigvalsh(p), [0, 0.5], atol=1e-15)


def test_zero_element_warns():
    with pytest.warns(UserWarning, match="never fires"):
        povm = validate_povm([np.diag([1, 0]), np.diag([0, 1]), np.zeros((2, 2))])
    assert povm.warnings


def test_born_examples(z, tetra, mub):
    np.testing.assert_allclose(born_probabilities(z, np.diag([1, 0])), [1, 0])
    np.testing.assert_allclose(born_probabilities(tetra, np.eye(2) / 2), [0.25] * 4)
    rho = np.diag([0.75, 0.25])
    # direct trace, ordering x+, x-, y+, y-, z+, z-
    expected = [np.trace(p @ rho).real for p in mub.elements]
    np.testing.assert_allclose(expected, [1 / 6, 1 / 6, 1 / 6, 1 / 6, 1 / 4, 1 / 12], atol=1e-15)
    np.testing.assert_allclose(born_probabilities(mub, rho), expected, atol=1e-15)


def test_born_dimension_mismatch(z):
    with pytest.raises(DimensionError):
        born_probabilities(z, np.eye(3) / 3)


def test_born_affine_and_normalized(rng):
    for d, n in [(2, 5), (3, 7)]:
        povm = corpus.random_povm(rng, d, n)
        for _ in range(100):
            r1, r2 = corpus.random_density(rng, d), corpus.random_density(rng, d)
            lam = rng.uniform()
            mixed = born_probabilities(povm, lam * r1 + (1 - lam) * r2)
            p1, p2 = born_probabilities(povm, r1), born_probabilities(povm, r2)
            np.testing.assert_allclose(mixed, lam * p1 + (1 - lam) * p2, atol=1e-12)
            assert abs(p1.sum() - 1) <= 1e-9


def test_density_matrix_checks():
    density_matrix(np.eye(2) / 2)
    with pytest.raises(InvalidState):
        density_matrix(np.eye(2))
    with pytest.raises(InvalidState):
        density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidState):
        density_matrix(np.array([[0.5, 0.1], [0.2, 0.5]]))


def test_ensemble_average(rng):
    states = [corpus.random_density(rng, 3) for _ in range(3)]
    ens = make_ensemble(states, [0.2, 0.3, 0.5])
    np.testing.assert_allclose(ens.average_state, 0.2 * states[0] + 0.3 * states[1] + 0.5 * states[2])


@pytest.mark.parametrize("maker, rank, ic", [
    (corpus.z_povm, 2, False),
    (corpus.tetrahedron_povm, 4, True),
    (corpus.mub6_povm, 4, True),
    (lambda: validate_povm([np.eye(2) / 3] * 3), 1, False),
])
def test_span_rank(maker, rank, ic):
    span = span_basis(maker())
    assert span.rank == rank
    assert is_informationally_complete(span) == ic
    gram = np.einsum("aij,bij->ab", span.basis.conj(), span.basis)
    np.testing.assert_allclose(gram, np.eye(rank), atol=1e-9)


def test_tetrahedron_singular_values(tetra):
    # independent: singular values of the 4x4 matrix of flattened elements
    lam = np.array([p.reshape(-1) for p in tetra.elements]).T
    sv = np.linalg.svd(lam, compute_uv=False)
    assert np.all(sv > 1e-3)
    np.testing.assert_allclose(span_basis(tetra).singular_values, sv)


def test_project_onto_span(z, tetra, rng):
    zs = span_basis(z)
    xs, res = project_onto_span(zs, PAULI_Z)
    np.testing.assert_allclose(xs, PAULI_Z, atol=1e-12)
    assert res < 1e-12
    xs, res = project_onto_span(zs, PAULI_X)
    np.testing.assert_allclose(xs, 0, atol=1e-12)
    assert res == pytest.approx(np.sqrt(2))
    ts = span_basis(tetra)
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert project_onto_span(ts, x)[1] < 1e-12


def test_projection_idempotent_and_elements_in_span(rng):
    povm = corpus.random_povm(rng, 3, 6)
    span = span_basis(povm)
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    xs, _ = project_onto_span(span, x)
    xss, res = project_onto_span(span, xs)
    np.testing.assert_allclose(xss, xs, atol=1e-9)
    assert res <= 1e-9
    for p in povm.elements:
        assert project_onto_span(span, p)[1] <= 1e-9
