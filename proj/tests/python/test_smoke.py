"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import alloylab as al


def test_version():
    assert al.__version__ == "0.1.0"


def test_example1_inverse_entries():
    alpha = al.ConvolutionVector.one_d([1.0, -1.0])
    assert not alpha.admissible()
    box = al.IndexBox(1, 3, alpha)
    t = al.build_transform(alpha, box)
    b = np.asarray(t.b)
    expected = np.tril(np.ones((4, 4)))
    assert np.array_equal(b, expected)
    assert t.row_sum_norm_b == 4.0


def test_norm_bound_holds():
    alpha = al.ConvolutionVector.one_d([1.0, -0.5])
    t = al.build_transform(alpha, al.IndexBox(1, 8, alpha))
    rep = t.verify_norm_bound()
    assert rep.bound == pytest.approx(2.0)
    assert rep.holds


def test_not_admissible_raises():
    alpha = al.ConvolutionVector.one_d([1.0, -1.0])
    t = al.build_transform(alpha, al.IndexBox(1, 4, alpha))
    with pytest.raises(al.NotAdmissible):
        t.verify_norm_bound()


def test_forward_inverse_round_trip():
    alpha = al.ConvolutionVector.one_d([1.0, -0.5])
    t = al.build_transform(alpha, al.IndexBox(1, 5, alpha))
    rng = np.random.default_rng(0)
    omega = rng.uniform(-0.5, 0.5, size=6)
    eta = t.forward(omega)
    back = t.inverse(eta)
    assert np.max(np.abs(back - omega)) < 1e-10


def test_conditional_density_linear_law():
    alpha = al.ConvolutionVector.one_d([1.0, -1.0])
    box = al.IndexBox(1, 4, alpha)
    cd = al.CommonDensity(al.build_transform(alpha, box), al.DensityModel.by_id("triangular"))
    rep = cd.conditional(box.index_of(2), np.zeros(cd.size))
    assert rep.defined
    assert rep.rho == pytest.approx(3.0, abs=1e-4)  # l - j + 1 with l = 4, j = 2


def test_free_laplacian_closed_form():
    ev = np.asarray(al.free_laplacian_spectrum_1d(8, 4))
    n, h2 = 32, 16.0
    expected = np.sort((2.0 - 2.0 * np.cos(2.0 * np.pi * np.arange(n) / n)) * h2)
    assert np.max(np.abs(ev - expected)) < 1e-10


def test_model_spectrum_and_counting():
    model = al.ModelSpec([1.0, -0.5], mesh=4)
    h = al.assemble_from_seed(model, 6, 11)
    ev = np.asarray(h.eigenvalues())
    assert ev.shape == (24,)
    assert np.all(np.diff(ev) >= -1e-12)
    below = al.counting(ev, float(ev[5]) + 1e-9, 6)
    assert below == pytest.approx(6.0 / 6.0)
    assert al.trace_projection(ev, float(ev[0]), float(ev[2])) == 3


def test_sampling_is_deterministic():
    density = al.DensityModel.by_id("triangular")
    alpha = al.ConvolutionVector.one_d([1.0])
    box = al.IndexBox(1, 50, alpha)
    a = np.asarray(al.sample_field(density, box, 7))
    b = np.asarray(al.sample_field(density, box, 7))
    assert np.array_equal(a, b)
    assert np.max(np.abs(a)) <= 0.5


def test_expected_trace_monotone_in_eps():
    model = al.ModelSpec([1.0, -0.5], mesh=4)
    mean_small, _ = al.expected_trace(model, 2.0, 0.5, 8, 40, 3)
    mean_big, _ = al.expected_trace(model, 2.0, 1.0, 8, 40, 3)
    assert mean_big >= mean_small


def test_resolvent_identity_residual():
    model = al.ModelSpec([1.0, -0.5], mesh=4)
    res = al.resolvent_identity_residual(model, 10, 6, 1.5, 0.1, 5)
    assert res <= 1e-8


def test_uniform_density_rejects_derivative():
    density = al.DensityModel.by_id("uniform")
    with pytest.raises(al.NotDifferentiable):
        density.fprime_l1()
