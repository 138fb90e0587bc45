import numpy as np
import pytest
from conftest import cached_basis
from hypothesis import given, settings
from hypothesis import strategies as st

from mathieu_lattice.errors import ContaminatedModeError, DomainError, LabelingError
from mathieu_lattice.mathieu_eval import (
    MathieuFunction,
    classical_form,
    eval_cse,
    ode_residual,
    overlap,
    overlap_quadrature,
    uniform_grid,
)
from mathieu_lattice.oracles import ce_even, mathieu_coefficients, se_even
from mathieu_lattice.spectrum import SQRT2, spectral_basis


def fn(q, J, m):
    return MathieuFunction.from_basis(cached_basis(q, J), m)


def test_q0_ground_mode_is_constant():
    f = MathieuFunction.from_basis(spectral_basis(0, 8), 0)
    assert np.array_equal(eval_cse(f, uniform_grid(32)), np.ones(32, complex))


@pytest.mark.parametrize("m", range(8))
def test_parity_under_reflection(m):
    f = fn(1.0, 32, m)
    x = uniform_grid(64)
    s = 1 if f.parity == "even" else -1
    assert np.abs(eval_cse(f, -x) - s * eval_cse(f, x)).max() < 1e-14


@pytest.mark.parametrize("m", range(10))
def test_reality_and_periodicity(m):
    f = fn(2.0, 32, m)
    x = uniform_grid(257)
    v = eval_cse(f, x)
    if f.parity == "even":
        assert np.abs(v.imag).max() <= 1e-12
    else:
        assert np.abs(v.real).max() <= 1e-12
    assert np.abs(eval_cse(f, x + 2 * np.pi) - v).max() <= 1e-12


def test_ground_mode_against_ce_oracle():
    f = fn(1.0, 32, 0)
    x = uniform_grid(64)
    ref = SQRT2 * ce_even(0, x / 2, 4.0)
    assert np.abs(eval_cse(f, x) - ref).max() < 1e-10


@pytest.mark.parametrize("m", range(1, 8))
def test_higher_modes_against_oracle(m):
    f = fn(1.0, 32, m)
    form = classical_form(f)
    x = uniform_grid(48)
    if form.kind == "ce":
        ref = SQRT2 * ce_even(form.order, x / 2, 4.0)
    else:
        ref = 1j * SQRT2 * se_even(form.order, x / 2, 4.0)
    assert np.abs(form.sign * eval_cse(f, x) - ref).max() < 1e-10
    assert np.abs(form.sign * eval_cse(f, x) - (1 if form.kind == "ce" else 1j) * SQRT2 * form.evaluate(x / 2)).max() < 1e-13


def test_general_sum_path_for_undefined_parity():
    f = MathieuFunction.from_basis(spectral_basis(0, 4), 1)
    assert f.parity is None
    x = uniform_grid(16)
    j = int(spectral_basis(0, 4).sites[np.argmax(f.coefficients)])
    assert np.abs(eval_cse(f, x) - np.exp(1j * j * x)).max() < 1e-15


# --- classical_form -------------------------------------------------------

@pytest.mark.parametrize("m", range(12))
def test_classical_normalization(m):
    form = classical_form(fn(2.0, 32, m))
    c = form.coefficients
    if form.kind == "ce":
        assert 2 * c[0] ** 2 + np.sum(c[1:] ** 2) == pytest.approx(1.0, abs=1e-13)
    else:
        assert np.sum(c ** 2) == pytest.approx(1.0, abs=1e-13)
    assert form.q_mathieu == 8.0


def test_classical_ground_coefficient_matches_oracle():
    form = classical_form(fn(1.0, 32, 0))
    _, ref = mathieu_coefficients("ce", 0, 4.0)
    assert abs(form.coefficients[0] - ref[0]) < 1e-9
    assert np.abs(form.coefficients[:20] - ref[:20]).max() < 1e-12


def test_classical_odd_coefficients_match_oracle():
    form = classical_form(fn(1.0, 32, 3))
    assert (form.kind, form.order) == ("se", 4)
    _, ref = mathieu_coefficients("se", 4, 4.0)
    assert np.abs(form.coefficients[:20] - ref[:20]).max() < 1e-12


def test_classical_form_needs_parity_and_label():
    with pytest.raises(LabelingError):
        classical_form(MathieuFunction.from_basis(spectral_basis(0, 4), 1))
    with pytest.raises(LabelingError):
        classical_form(MathieuFunction.from_basis(spectral_basis(0, 4), 0))


# --- ode_residual -------------------------------------------------------------

def test_residual_q2_ground():
    f = fn(2.0, 32, 0)
    assert ode_residual(f, f.eigenvalue, uniform_grid(1024)) <= 1e-9


def test_residual_q0_exact():
    b = spectral_basis(0, 6)
    assert np.count_nonzero(b.contaminated) == 2
    for m in np.flatnonzero(~b.contaminated):
        f = MathieuFunction.from_basis(b, m)
        assert ode_residual(f, f.eigenvalue, uniform_grid(64)) == 0.0


@pytest.mark.parametrize("q", [0.5, 2.0, 5.0])
def test_residual_bound_all_clean_modes(q):
    b = cached_basis(q, 32)
    bound = 10 * b.eig_tol * (2 * b.J + 1)
    for m in np.flatnonzero(~b.contaminated):
        f = MathieuFunction.from_basis(b, m)
        assert ode_residual(f, f.eigenvalue, uniform_grid(256)) <= bound * max(1.0, abs(f.eigenvalue))


def test_residual_matches_dense_operator():
    # at x = 0 the residual is the plain sum of (H - E) A plus the two spill-over terms q A_{+-J}
    b = cached_basis(2.0, 32)
    H = np.diag(b.sites.astype(float) ** 2) + 2.0 * (np.eye(65, k=1) + np.eye(65, k=-1))
    for m in (0, 4, 9):
        f = MathieuFunction.from_basis(b, m)
        A = f.coefficients
        expect = abs(np.sum(H @ A - f.eigenvalue * A) + 2.0 * (A[0] + A[-1]))
        assert ode_residual(f, f.eigenvalue, [0.0]) == pytest.approx(expect, abs=1e-13)


def test_residual_detects_wrong_eigenvalue():
    f = fn(2.0, 32, 0)
    assert ode_residual(f, f.eigenvalue + 1e-3, uniform_grid(64)) > 1e-4


def test_contaminated_mode_refused():
    b = cached_basis(2.0, 16)
    m = int(np.flatnonzero(b.contaminated)[0])
    f = MathieuFunction.from_basis(b, m)
    with pytest.raises(ContaminatedModeError):
        eval_cse(f, 0.0)
    with pytest.raises(ContaminatedModeError):
        ode_residual(f, f.eigenvalue, [0.0])


# --- orthonormality -----------------------------------------------------------

def test_orthonormality_parseval_and_quadrature():
    b = cached_basis(2.0, 32)
    fs = [MathieuFunction.from_basis(b, m) for m in range(12)]
    for i, a in enumerate(fs):
        for k, c in enumerate(fs):
            expect = 1.0 if i == k else 0.0
            assert abs(overlap(a, c) - expect) <= 1e-10
            assert abs(overlap_quadrature(a, c) - expect) <= 1e-10


def test_grid_and_index_guards():
    with pytest.raises(DomainError):
        uniform_grid(0)
    with pytest.raises(DomainError):
        MathieuFunction.from_basis(cached_basis(2.0, 16), 33)


@settings(max_examples=20, deadline=None)
@given(q=st.floats(min_value=0.05, max_value=6), m=st.integers(min_value=0, max_value=6))
def test_property_parseval_quadrature_agree(q, m):
    b = spectral_basis(q, 24)
    f = MathieuFunction.from_basis(b, m)
    assert abs(overlap_quadrature(f, f) - 1) <= 1e-12
    assert abs(overlap(f, f) - 1) <= 1e-12
