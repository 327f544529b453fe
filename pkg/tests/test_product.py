import math

import numpy as np
import pytest

from hardylab.atoms import (
    Atom,
    AtomicDecomposition,
    make_atom,
    moment_residuals,
    moment_tolerance,
    synthesize,
)
from hardylab.generators import (
    b_field,
    random_decomposition,
    random_lipschitz_field,
    random_smooth_field,
    regularized_log_field,
)
from hardylab.grid import Ball, GridFunction, ball_mean
from hardylab.lipschitz import LipschitzOrder, lambda_gamma_norm
from hardylab.maximal import bump_profile
from hardylab.orlicz import luxembourg_scan_oracle, PHI
from hardylab.oscillation import bmo_local_norm
from hardylab.product import (
    REGIME_MEAN,
    REGIME_P1,
    REGIME_PROJ,
    duality_identity_check,
    exp_class_product_bound,
    pairing_limit_check,
    split_bmo,
    split_lipschitz,
    truncate,
    verify_split,
)


def test_truncate(spec1d, rng):
    b = random_smooth_field(spec1d, rng)
    sup = float(np.max(np.abs(b.values)))
    assert np.array_equal(truncate(b, sup + 1.0).values, b.values)
    flat = truncate(GridFunction.constant(spec1d, 4.0), 2.0)
    assert np.all(flat.values == 2.0)
    with pytest.raises(ValueError):
        truncate(b, 0.0)


def test_pairing_gap_closes_exactly(spec1d, rng):
    b = random_smooth_field(spec1d, rng)
    h = random_smooth_field(spec1d, rng)
    sup = float(np.max(np.abs(b.values)))
    report = pairing_limit_check(b, h, [sup / 4.0, sup / 2.0, sup, 2.0 * sup])
    assert report["gaps"][-1] == 0.0
    assert report["gaps"][-2] == 0.0


def test_pairing_zero_h(spec1d, rng):
    b = random_smooth_field(spec1d, rng)
    report = pairing_limit_check(b, GridFunction.zeros(spec1d), [1.0, 2.0])
    assert report["full_pairing"] == 0.0
    assert all(g == 0.0 for g in report["gaps"])


def test_pairing_monotone_for_log(spec1d):
    b = regularized_log_field(spec1d)
    x = spec1d.meshes()[0]
    h = GridFunction(spec1d, bump_profile(x / 2.0))
    sup = float(np.max(np.abs(b.values)))
    levels = [sup / 8, sup / 4, sup / 2, sup]
    gaps = pairing_limit_check(b, h, levels)["gaps"]
    assert all(a >= b_ - 1e-15 for a, b_ in zip(gaps, gaps[1:]))
    assert gaps[-1] == 0.0


def test_duality_identity(spec1d, rng):
    x = spec1d.meshes()[0]
    test = GridFunction(spec1d, bump_profile(x / 3.0))
    for _ in range(10):
        b = random_smooth_field(spec1d, rng)
        h = random_smooth_field(spec1d, rng)
        gap = duality_identity_check(b, h, test)
        scale = (
            np.max(np.abs(b.values))
            * np.max(np.abs(h.values))
            * np.max(np.abs(test.values))
            * spec1d.box_measure
        )
        assert gap <= 1e-12 * scale
    assert duality_identity_check(b, h, GridFunction.zeros(spec1d)) == 0.0


def test_split_bmo_constant_b(spec1d, rng):
    decomp = random_decomposition(spec1d, rng, p=1.0, s=0)
    b = GridFunction.constant(spec1d, 3.0)
    split = split_bmo(b, decomp)
    assert split.regime == REGIME_P1
    assert np.all(split.h1.values == 0.0)
    prod = b.values * synthesize(decomp).values
    assert np.array_equal(split.h2.values, prod)


def test_split_bmo_zero_mean_single_atom(spec1d):
    atom = make_atom(Ball((0.0,), 1.0), 1.0, 0, spec1d)
    decomp = AtomicDecomposition(p=1.0, terms=((1.0, atom),))
    b = GridFunction.from_callable(spec1d, lambda x: x)
    assert abs(ball_mean(b, atom.ball)) < 1e-13
    split = split_bmo(b, decomp)
    assert np.max(np.abs(split.h2.values)) < 1e-12


def test_split_bmo_requires_p1(spec1d, rng):
    decomp = random_decomposition(spec1d, rng, p=0.8, s=0)
    b = random_smooth_field(spec1d, rng)
    with pytest.raises(ValueError, match="p = 1"):
        split_bmo(b, decomp)


def test_split_rejects_invalid_atom(spec1d, rng):
    good = make_atom(Ball((0.0,), 1.0), 1.0, 0, spec1d)
    bad_vals = good.values.with_values(good.values.values * 3.0)
    bad = Atom(bad_vals, good.ball, 1.0, math.inf, 0)
    decomp = AtomicDecomposition(p=1.0, terms=((1.0, good), (1.0, bad)))
    b = random_smooth_field(spec1d, rng)
    with pytest.raises(ValueError, match="atom 1"):
        split_bmo(b, decomp)


def test_split_reconstruction_is_complement(spec1d, rng):
    decomp = random_decomposition(spec1d, rng, p=1.0, s=0)
    b = b_field(spec1d, "random-bmo", rng)
    split = split_bmo(b, decomp)
    prod = b.values * synthesize(decomp, spec1d).values
    assert np.array_equal(prod - split.h1.values, split.h2.values)
    recon = split.h1.values + split.h2.values
    tol = 4.0 * np.spacing(
        np.maximum.reduce([np.abs(prod), np.abs(split.h1.values), np.abs(split.h2.values)])
    )
    assert np.all(np.abs(recon - prod) <= tol)


def test_split_bilinearity_power_of_two(spec1d, rng):
    decomp = random_decomposition(spec1d, rng, p=1.0, s=0)
    b = random_smooth_field(spec1d, rng)
    base = split_bmo(b, decomp)
    doubled = split_bmo(b.with_values(2.0 * b.values), decomp)
    assert np.array_equal(doubled.h1.values, 2.0 * base.h1.values)
    assert np.array_equal(doubled.h2.values, 2.0 * base.h2.values)
    scaled = AtomicDecomposition(
        p=1.0, terms=tuple((2.0 * lam, a) for lam, a in decomp.terms)
    )
    relam = split_bmo(b, scaled)
    assert np.array_equal(relam.h1.values, 2.0 * base.h1.values)
    assert np.array_equal(relam.h2.values, 2.0 * base.h2.values)


def test_split_lipschitz_gamma_mismatch(spec1d, rng):
    decomp = random_decomposition(spec1d, rng, p=0.8, s=0)
    b = random_smooth_field(spec1d, rng)
    with pytest.raises(ValueError, match="gamma"):
        split_lipschitz(b, decomp, LipschitzOrder(0.5))


def test_split_lipschitz_mean_regime(spec1d, rng):
    p = 0.8
    gamma = 1.0 / p - 1.0
    decomp = random_decomposition(spec1d, rng, p=p, s=0)
    b = random_lipschitz_field(spec1d, rng, gamma)
    split = split_lipschitz(b, decomp, LipschitzOrder(gamma))
    assert split.regime == REGIME_MEAN
    for entry in split.ledger:
        assert entry.subtracted["type"] == "mean"


def test_split_lipschitz_projection_regime(spec1d, rng):
    p = 0.4
    gamma = 1.0 / p - 1.0  # 1.5, so k = 1 and s must reach 2
    decomp = random_decomposition(spec1d, rng, p=p, s=2)
    b = random_lipschitz_field(spec1d, rng, gamma)
    split = split_lipschitz(b, decomp, LipschitzOrder(gamma))
    assert split.regime == REGIME_PROJ
    for entry in split.ledger:
        assert entry.subtracted["type"] == "projection"
        assert entry.subtracted["degree"] == 1
        term_sup = entry.rescale_constant * entry.ball.measure ** (-1.0 / p)
        for alpha, value in entry.moment_residuals.items():
            assert abs(value) <= moment_tolerance(term_sup, entry.ball, sum(alpha))


def test_split_lipschitz_needs_moments(spec1d, rng):
    p = 0.4
    decomp = random_decomposition(spec1d, rng, p=p, s=0)
    b = random_lipschitz_field(spec1d, rng, 1.5)
    with pytest.raises(ValueError, match="need s >="):
        split_lipschitz(b, decomp, LipschitzOrder(1.5))


def test_split_lipschitz_constant_b_projection(spec1d, rng):
    p = 0.4
    decomp = random_decomposition(spec1d, rng, p=p, s=2)
    b = GridFunction.constant(spec1d, 2.0)
    split = split_lipschitz(b, decomp, LipschitzOrder(1.5))
    sup_scale = float(np.max(np.abs(split.h2.values)))
    assert np.max(np.abs(split.h1.values)) <= 1e-10 * max(sup_scale, 1.0)


def test_exp_class_bound(spec1d, rng):
    ball = Ball((0.0,), 0.5)
    zero = GridFunction.zeros(spec1d)
    x = spec1d.meshes()[0]
    psi = GridFunction(spec1d, 1.0 + 0.2 * np.cos(x))
    assert exp_class_product_bound(zero, psi, ball) == 0.0
    with pytest.raises(ValueError, match="unit measure"):
        exp_class_product_bound(zero, psi, Ball((0.0,), 2.0))
    big = GridFunction.constant(spec1d, 5.0)
    with pytest.raises(ValueError, match="hypothesis violated"):
        exp_class_product_bound(big, psi, ball)
    with pytest.raises(ValueError, match="vanishes"):
        exp_class_product_bound(zero, zero, ball)


def test_exp_class_constant_oracle(spec1d):
    ball = Ball((0.0,), 0.5)
    # leave O(spacing) headroom: the quadrature measure of the unit ball
    # overshoots 1 slightly, and the hypothesis is checked with it
    level = math.log(2.0) * 0.9
    b = GridFunction.constant(spec1d, level)
    x = spec1d.meshes()[0]
    psi = GridFunction(spec1d, 1.0 + 0.1 * np.sin(x))
    got = exp_class_product_bound(b, psi, ball)
    prod = b.with_values(b.values * psi.values)
    from hardylab.grid import integrate

    expect = luxembourg_scan_oracle(prod, PHI, ball) / integrate(
        psi.with_values(np.abs(psi.values)), ball
    )
    assert got == pytest.approx(expect, rel=1e-6)


def test_verify_split_empty(spec1d):
    decomp = AtomicDecomposition(p=1.0, terms=())
    b = GridFunction.constant(spec1d, 1.0)
    split = split_bmo(b, decomp)
    report = verify_split(split, b_scale=1.0, decomp=decomp)
    assert report.norm_h1_l1 == 0.0
    assert report.norm_h2_target == 0.0
    assert report.c1 == 0.0 and report.c2 == 0.0


def test_verify_split_report_fields(spec1d, rng):
    decomp = random_decomposition(spec1d, rng, p=1.0, s=0)
    b = b_field(spec1d, "random-bmo", rng)
    split = split_bmo(b, decomp)
    report = verify_split(split, bmo_local_norm(b), decomp)
    assert report.regime == REGIME_P1
    assert report.c1 >= 0 and np.isfinite(report.c1)
    assert report.c2 >= 0 and np.isfinite(report.c2)
    row = report.to_csv_row()
    assert len(row) == len(report.CSV_FIELDS)
    doc = report.to_dict()
    assert doc["C1"] == report.c1


def test_verify_split_local_regimes(spec1d, rng):
    decomp = random_decomposition(spec1d, rng, p=1.0, s=0, local=True)
    b = b_field(spec1d, "random-bmo", rng)
    split = split_bmo(b, decomp, local=True)
    assert split.is_local
    report = verify_split(split, bmo_local_norm(b), decomp)
    assert np.isfinite(report.c2)


def test_pointwise_maximal_domination(spec1d, rng):
    """M h2 is dominated by the weighted sum of per-atom maximal functions."""
    from hardylab.maximal import maximal_fn

    decomp = random_decomposition(spec1d, rng, p=1.0, s=0, n_atoms=3)
    b = random_smooth_field(spec1d, rng)
    split = split_bmo(b, decomp)
    bound = np.zeros(spec1d.shape)
    for entry, (lam, atom) in zip(split.ledger, decomp.terms):
        m = entry.subtracted["value"]
        bound += abs(lam) * abs(m) * maximal_fn(atom.values).values
    lhs = maximal_fn(split.h2).values
    assert np.all(lhs <= bound + 1e-9 * np.max(bound, initial=1.0))
