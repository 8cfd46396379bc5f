import math

import numpy as np
import pytest

from evolsym.errors import ConeUndefined, GridResolutionError, MatrixExpOverflow, PetrovskiiViolation
from evolsym.fields import FieldState, GridSpec
from evolsym.gallery import gallery_operator
from evolsym.solver import (
    bump_field,
    cone_estimate,
    kernel,
    mass_outside_cone,
    mode_field,
    multiplier,
    propagate,
    random_field,
    semigroup_residual,
    support_radius,
    unitarity_check,
)

G1 = GridSpec.uniform(1, 20.0, 64)


def test_zero_time_is_identity():
    for name in ("heat", "wave", "schrodinger", "wave-companion"):
        op = gallery_operator(name)
        u0 = random_field(G1, op.m, seed=1)
        np.testing.assert_allclose(propagate(op, u0, 0.0).data, u0.data, atol=1e-12)
        E = multiplier(op, G1, 0.0)
        np.testing.assert_array_equal(E, np.broadcast_to(np.eye(op.m)[:, :, None], E.shape))


def test_schrodinger_multiplier_closed_form():
    t = 0.3
    E = multiplier(gallery_operator("schrodinger"), G1, t)[0, 0]
    xi = G1.frequency_axes()[0]
    np.testing.assert_allclose(E, np.exp(-1j * t * xi**2), atol=1e-12)


def test_heat_mode_decay():
    t, k = 0.2, 5
    u = propagate(gallery_operator("heat"), mode_field(G1, k), t)
    xi = 2 * np.pi * k / 20.0
    np.testing.assert_allclose(u.data[0], math.exp(-t * xi**2) * mode_field(G1, k).data[0], atol=1e-12)


def test_heat_in_two_dimensions():
    g = GridSpec((10.0, 12.0), (16, 16))
    u = propagate(gallery_operator("heat:n=2"), mode_field(g, [1, -2]), 0.5)
    xi2 = (2 * np.pi / 10) ** 2 + (4 * np.pi / 12) ** 2
    np.testing.assert_allclose(u.data, math.exp(-0.5 * xi2) * mode_field(g, [1, -2]).data, atol=1e-12)


def test_transport_kernel_is_a_shifted_delta():
    g = GridSpec.uniform(1, 40.0, 256)
    c, t = 1.5, 2.3
    K = kernel(gallery_operator(f"transport:c={c}"), t, g)
    x = g.axes()[0]
    assert abs(x[np.argmax(np.abs(K.data[0, 0]))] - (-c * t)) <= g.cell


def test_kernel_at_zero_is_discrete_delta():
    K = kernel(gallery_operator("wave"), 0.0, G1)
    i0 = G1.origin_index()[0]
    expected = np.zeros_like(K.data)
    expected[:, :, i0] = np.eye(2) / G1.cell
    np.testing.assert_allclose(K.data, expected, atol=1e-10)


def test_kernel_convolution_matches_propagation():
    g = GridSpec.uniform(1, 10.0, 32)
    op = gallery_operator("wave")
    t = 0.7
    u0 = random_field(g, 2, seed=3)
    K = kernel(op, t, g).data
    N, h = 32, g.cell
    direct = np.zeros_like(u0.data)
    for i in range(N):
        for j in range(N):
            direct[:, i] += h * K[:, :, (i - j + N // 2) % N] @ u0.data[:, j]
    np.testing.assert_allclose(propagate(op, u0, t).data, direct, atol=1e-10)


@pytest.mark.parametrize("name", ["heat", "schrodinger", "transport", "wave", "wave-energy", "wave-companion"])
def test_semigroup_law(name):
    op = gallery_operator(name)
    u0 = random_field(G1, op.m, seed=7)
    for s, t in [(0.25, 0.5), (1.0, 0.25)]:
        assert semigroup_residual(op, s, t, u0) <= 1e-9


def test_backward_heat_refused_and_overflow_names_xi():
    op = gallery_operator("backward-heat")
    g = GridSpec.uniform(1, 20.0, 1024)
    u0 = bump_field(g)
    with pytest.raises(PetrovskiiViolation):
        propagate(op, u0, 1.0)
    with pytest.raises(MatrixExpOverflow) as info:
        propagate(op, u0, 1.0, force=True)
    assert info.value.xi is not None and abs(info.value.xi[0]) > 20


def test_backward_heat_forced_short_time():
    op = gallery_operator("backward-heat")
    u = propagate(op, mode_field(G1, 1), 0.1, force=True)
    xi = 2 * np.pi / 20
    np.testing.assert_allclose(u.data[0], math.exp(0.1 * xi**2) * mode_field(G1, 1).data[0], atol=1e-12)


def test_support_radius_examples():
    g = GridSpec.uniform(1, 10.0, 100)
    u = bump_field(g, radius=2.0, center=[1.0])
    # the thresholded support lies strictly inside the ball, within one cell of its edge
    assert 3.0 - g.cell - 1e-9 <= support_radius(u, [1.0]) < 3.0
    assert 1.0 - g.cell - 1e-9 <= support_radius(u, [-1.0]) < 1.0
    assert support_radius(FieldState(g, np.zeros(100)), [1.0]) == 0.0
    with pytest.raises(ValueError):
        support_radius(u, [1.0], threshold=0)


def test_unitarity_of_skew_symbols():
    g = GridSpec.uniform(2, 10.0, 32)
    for name in ("schrodinger:n=2", "wave-energy:n=2"):
        op = gallery_operator(name)
        u0 = random_field(g, op.m, seed=2)
        rep = unitarity_check(op, u0, propagate(op, u0, 1.3))
        assert rep["applicable"] and rep["passed"], rep
    rep = unitarity_check(gallery_operator("heat:n=2"), random_field(g), propagate(gallery_operator("heat:n=2"), random_field(g), 1.0))
    assert not rep["applicable"]


CONE_GRID = GridSpec.uniform(1, 100.0, 1024)


def test_wave_cone_speed_one():
    cone = cone_estimate(gallery_operator("wave"), (0.5, 1.0, 2.0), CONE_GRID)
    h = CONE_GRID.cell
    np.testing.assert_allclose(cone.radii, np.outer([1, 1], [0.5, 1.0, 2.0]), atol=1.5 * h)
    assert cone.scaled_radii_spread <= cone.spread_tolerance(2.0)


def test_transport_cone_is_one_sided():
    cone = cone_estimate(gallery_operator("transport"), (0.5, 1.0, 2.0), CONE_GRID)
    # +x direction first: support moves towards -x only
    assert np.all(cone.radii[0] <= CONE_GRID.cell)
    np.testing.assert_allclose(cone.radii[1], [0.5, 1.0, 2.0], atol=1.5 * CONE_GRID.cell)


def test_cone_undefined_for_parabolic():
    with pytest.raises(ConeUndefined):
        cone_estimate(gallery_operator("heat"), (1.0,), CONE_GRID)


def test_cone_resolution_guards():
    with pytest.raises(GridResolutionError):
        cone_estimate(gallery_operator("wave"), (0.01, 1.0), CONE_GRID)
    with pytest.raises(GridResolutionError):
        cone_estimate(gallery_operator("wave"), (1.0, 49.0), CONE_GRID)


def test_finite_propagation_of_a_bump():
    op = gallery_operator("wave")
    cone = cone_estimate(op, (0.5, 1.0, 2.0), CONE_GRID)
    u0 = bump_field(CONE_GRID, 2, radius=3.0)
    r0 = [support_radius(u0, d) for d in cone.directions]
    for t in (0.5, 1.0, 2.0):
        assert mass_outside_cone(propagate(op, u0, t), cone, t, r0) <= 1e-8
    # a cone that is too narrow does leak
    assert mass_outside_cone(propagate(op, u0, 2.0), cone, 2.0, np.array(r0) - 2.0, margin_cells=0) > 1e-3


def test_multiplier_mollifier_damps_high_frequencies():
    E = multiplier(gallery_operator("schrodinger"), G1, 0.0, mollifier_cells=3.0)[0, 0]
    sigma = 3 * G1.cell
    np.testing.assert_allclose(E, np.exp(-0.5 * (sigma * G1.frequency_axes()[0]) ** 2))


def test_companion_and_first_order_wave_agree_on_u():
    u0 = bump_field(CONE_GRID, 2, radius=3.0)
    a = propagate(gallery_operator("wave"), u0, 1.0)
    b = propagate(gallery_operator("wave-companion"), u0, 1.0)
    np.testing.assert_allclose(a.data, b.data, atol=1e-12)
