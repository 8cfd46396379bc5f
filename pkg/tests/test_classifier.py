import json
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_operator
from evolsym.classifier import (
    INCONCLUSIVE,
    SATISFIED,
    VIOLATED,
    SamplingConfig,
    classify,
    direction_set,
    growth_bound_check,
    petrovskii_verdict,
    sample_spectral_bound,
)
from evolsym.gallery import gallery_operator
from evolsym.linalg import spectral_abscissa_batch
from evolsym.operator import PolyMatrixOperator
from evolsym.poly import Poly
from evolsym.reports import dumps

FAST = SamplingConfig(shells=12, directions=16, random_directions=16)


def test_direction_sets_are_antipodal_and_unit():
    for n in (1, 2, 3):
        d = direction_set(n, 16, 16, 0)
        np.testing.assert_allclose(np.linalg.norm(d, axis=1), 1.0)
        rows = {tuple(np.round(v, 12)) for v in d}
        assert all(tuple(np.round(-v, 12)) in rows for v in d)
    assert direction_set(1).shape == (2, 1)


def test_direction_set_is_deterministic():
    assert np.array_equal(direction_set(3, 8, 8, 4), direction_set(3, 8, 8, 4))
    assert not np.array_equal(direction_set(3, 8, 8, 4), direction_set(3, 8, 8, 5))


@pytest.mark.parametrize(
    "name,verdict,degP,p0,hyperbolic",
    [
        ("heat", SATISFIED, 2, Fraction(2), False),
        ("heat:n=2", SATISFIED, 2, Fraction(2), False),
        ("backward-heat", VIOLATED, 2, Fraction(2), False),
        ("schrodinger", SATISFIED, 2, Fraction(2), False),
        ("transport", SATISFIED, 1, Fraction(1), True),
        ("transport:c=-2.5", SATISFIED, 1, Fraction(1), True),
        ("wave", SATISFIED, 2, Fraction(1), True),
        ("wave:n=2", SATISFIED, 2, Fraction(1), True),
        ("wave-energy:n=2", SATISFIED, 3, Fraction(1), True),
        ("wave-companion", SATISFIED, 2, Fraction(1), True),
    ],
)
def test_gallery_classification(name, verdict, degP, p0, hyperbolic):
    c = classify(gallery_operator(name))
    assert (c.petrovskii, c.deg_P, c.p0, c.hyperbolic) == (verdict, degP, p0, hyperbolic)
    assert (c.deg_P == c.m) == (c.p0 <= 1)


def test_bounded_gallery_s0_is_zero():
    for name in ("heat", "schrodinger", "transport", "wave", "wave-energy", "wave-companion"):
        assert classify(gallery_operator(name)).s0_estimate == pytest.approx(0.0, abs=1e-9)


def test_sqrt_growth_is_violated():
    # [[0, 1], [d, 0]] has eigenvalues +-sqrt(i xi): real parts grow like sqrt|xi|
    op = PolyMatrixOperator.from_entries(1, [[0, 1], [[((1,), 1.0)], 0]])
    c = classify(op)
    assert c.petrovskii == VIOLATED
    assert not c.hyperbolic


def test_too_few_shells_is_inconclusive():
    report = sample_spectral_bound(gallery_operator("heat"), SamplingConfig(shells=2))
    assert petrovskii_verdict(report) == INCONCLUSIVE


def test_shell_maxima_match_closed_form():
    heat = sample_spectral_bound(gallery_operator("heat:n=2"), FAST)
    for s in heat.shells:
        assert s.abscissa_max == pytest.approx(-s.radius**2, rel=1e-9)
    back = sample_spectral_bound(gallery_operator("backward-heat"), FAST)
    for s in back.shells:
        assert s.abscissa_max == pytest.approx(s.radius**2, rel=1e-9)
    assert not back.verdict_bounded and back.s0_estimate == float("inf")
    for name in ("wave:n=2", "schrodinger:n=2", "transport:c=3"):
        rep = sample_spectral_bound(gallery_operator(name), FAST)
        for s in rep.shells:
            assert abs(s.abscissa_max) <= 1e-9 * s.radius
        assert rep.verdict_bounded


def test_pointwise_abscissa_matches_closed_form():
    xs = direction_set(2, 16, 16, 0)[:, None, :] * (2.0 ** np.arange(13))[None, :, None]
    xs = xs.reshape(-1, 2)
    r2 = np.sum(xs**2, axis=1)
    for name, expected in (("heat:n=2", -r2), ("backward-heat:n=2", r2), ("schrodinger:n=2", 0 * r2)):
        a, failed = spectral_abscissa_batch(gallery_operator(name).symbols(xs))
        assert not failed.any()
        np.testing.assert_allclose(a, expected, rtol=1e-9, atol=1e-9)


def test_shift_law():
    base = gallery_operator("wave")
    shifted = base + PolyMatrixOperator.identity(2, 1, 0.5 + 2j)
    r0 = sample_spectral_bound(base, FAST)
    r1 = sample_spectral_bound(shifted, FAST)
    assert r1.s0_estimate == pytest.approx(r0.s0_estimate + 0.5, abs=1e-9)
    for a, b in zip(r0.shells, r1.shells):
        assert b.abscissa_max == pytest.approx(a.abscissa_max + 0.5, abs=1e-10 * max(1.0, a.radius))


def test_reflection_and_permutation_invariance(rng):
    for _ in range(5):
        op = random_operator(rng, 2, 2, max_deg=1)
        r = sample_spectral_bound(op, FAST)
        # xi -> -xi: flip the sign of every odd-degree term
        flipped = PolyMatrixOperator(
            op.m,
            op.n,
            tuple(
                tuple(Poly(p.nvars, [(a, c * (-1) ** sum(a)) for a, c in p.terms]) for p in row) for row in op.entries
            ),
        )
        rf = sample_spectral_bound(flipped, FAST)
        for a, b in zip(r.shells, rf.shells):
            assert b.abscissa_max == pytest.approx(a.abscissa_max, rel=1e-9, abs=1e-9)
        # the +-e_j part of the direction set is permutation closed
        perm = sample_spectral_bound(op.permute_axes([1, 0]), SamplingConfig(shells=12, directions=0, random_directions=0))
        base = sample_spectral_bound(op, SamplingConfig(shells=12, directions=0, random_directions=0))
        for a, b in zip(base.shells, perm.shells):
            assert b.abscissa_max == pytest.approx(a.abscissa_max, rel=1e-9, abs=1e-9)


def test_classification_report_is_json():
    payload = json.loads(dumps({"c": classify(gallery_operator("heat"))}))
    assert payload["c"]["p0"] == "2"
    assert payload["c"]["petrovskii"] == SATISFIED
    assert payload["schema"] == 1


@pytest.mark.parametrize(
    "name,k",
    [("heat", 0), ("schrodinger", 0), ("transport", 0), ("wave-energy", 0), ("wave", 1), ("wave-companion", 1)],
)
def test_growth_bound(name, k):
    g = growth_bound_check(gallery_operator(name), 0.0)
    assert g.ok and g.k == k
    assert np.isfinite(g.sup)


def test_growth_bound_requires_finite_s0():
    with pytest.raises(ValueError):
        growth_bound_check(gallery_operator("heat"), float("inf"))
