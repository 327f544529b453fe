"""Constructive splits of the product b x h and their verification.

For h = sum lambda_j a_j, the split subtracts from b, on each atom's ball,
either its mean (p = 1 and the easy p < 1 range) or its degree-k polynomial
projection (small p), putting the difference part in L^1 and the remainder
in the target Hardy-type space:

    h1 = sum_j lambda_j (b - m_j) a_j,     h2 = b*h - h1,

with m_j the ball mean or projection.  h2 is stored as the pointwise
complement of h1 in the product, which makes the reconstruction identity
h1 + h2 = b * synthesize(decomp) exact by construction; the independently
accumulated mean part is kept in the ledger and agrees with h2 to a few ulps
of the working precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .atoms import (
    Atom,
    AtomicDecomposition,
    moment_residuals,
    synthesize,
    validate_atom,
)
from .grid import Ball, GridFunction, ball_mean, integrate, lp_norm, region_slices
from .lipschitz import LipschitzOrder
from .orlicz import PHI, hardy_phi_star_quasinorm, hardy_quasinorm, luxembourg_norm
from .projection import poly_project

__all__ = [
    "ProductSplit",
    "SplitLedgerEntry",
    "SplitReport",
    "truncate",
    "pairing_limit_check",
    "duality_identity_check",
    "split_bmo",
    "split_lipschitz",
    "exp_class_product_bound",
    "verify_split",
]

REGIME_P1 = "p1_bmo"
REGIME_P1_LOCAL = "p1_bmo_local"
REGIME_MEAN = "p_lt1_mean"
REGIME_MEAN_LOCAL = "p_lt1_mean_local"
REGIME_PROJ = "p_lt1_proj"
REGIME_PROJ_LOCAL = "p_lt1_proj_local"

_LOCAL_REGIMES = {REGIME_P1_LOCAL, REGIME_MEAN_LOCAL, REGIME_PROJ_LOCAL}
_P1_REGIMES = {REGIME_P1, REGIME_P1_LOCAL}


@dataclass(frozen=True)
class SplitLedgerEntry:
    """Per-atom record of what was subtracted and with what residuals."""

    lam: float
    ball: Ball
    subtracted: dict
    rescale_constant: float | None
    moment_residuals: dict


@dataclass(frozen=True)
class ProductSplit:
    h1: GridFunction
    h2: GridFunction
    regime: str
    ledger: tuple[SplitLedgerEntry, ...]

    @property
    def is_local(self) -> bool:
        return self.regime in _LOCAL_REGIMES

    def product(self) -> GridFunction:
        """b x h as carried by the split (h1 + h2, exact by construction)."""
        return self.h1.with_values(self.h1.values + self.h2.values)


def truncate(b: GridFunction, level: float) -> GridFunction:
    """Three-case clamp of b to [-level, level]."""
    if not level > 0:
        raise ValueError("truncation level must be positive")
    return b.with_values(np.clip(b.values, -level, level))


def pairing_limit_check(b: GridFunction, h: GridFunction, levels) -> dict:
    """Truncated pairings against h and their gaps to the full pairing."""
    b.require_same_spec(h)
    full = integrate(b.with_values(b.values * h.values))
    pairings = [
        integrate(b.with_values(truncate(b, k).values * h.values)) for k in levels
    ]
    gaps = [abs(v - full) for v in pairings]
    return {
        "levels": list(levels),
        "pairings": pairings,
        "full_pairing": full,
        "gaps": gaps,
        "b_sup": float(np.max(np.abs(b.values))),
    }


def duality_identity_check(
    b: GridFunction, h: GridFunction, testfn: GridFunction
) -> float:
    """|<b*h, phi> - <b*phi, h>| for a test function; pointwise associativity."""
    b.require_same_spec(h)
    b.require_same_spec(testfn)
    left = integrate(b.with_values((b.values * h.values) * testfn.values))
    right = integrate(b.with_values((b.values * testfn.values) * h.values))
    return abs(left - right)


def _validate_terms(decomp: AtomicDecomposition, allow_local: bool) -> None:
    for idx, (_, atom) in enumerate(decomp.terms):
        if atom.local and not allow_local:
            raise ValueError(f"atom {idx} is local but the split is not")
        report = validate_atom(atom)
        if not report.passed:
            raise ValueError(
                f"atom {idx} fails validation: {', '.join(report.failures)}"
            )


def _assemble(
    b: GridFunction,
    decomp: AtomicDecomposition,
    regime: str,
    subtractors,
) -> ProductSplit:
    """Accumulate h1 in fixed term order and store h2 as its complement."""
    h = synthesize(decomp, b.spec)
    prod = b.values * h.values
    h1 = np.zeros(b.spec.shape)
    mean_part = np.zeros(b.spec.shape)
    entries = []
    for (lam, atom), (m_vals, entry) in zip(decomp.terms, subtractors):
        h1 += lam * ((b.values - m_vals) * atom.values.values)
        mean_part += lam * (m_vals * atom.values.values)
        entries.append(entry)
    h2 = prod - h1
    # the independently accumulated mean part must agree with the stored
    # complement at rounding level; anything larger means a logic error
    drift = np.max(np.abs(mean_part - h2), initial=0.0)
    scale = max(np.max(np.abs(prod), initial=0.0), np.max(np.abs(h1), initial=0.0))
    if drift > 1e-9 * max(scale, 1.0):
        raise AssertionError("split rearrangement leaked mass")
    return ProductSplit(
        h1=GridFunction(b.spec, h1),
        h2=GridFunction(b.spec, h2),
        regime=regime,
        ledger=tuple(entries),
    )


def split_bmo(
    b: GridFunction, decomp: AtomicDecomposition, local: bool = False
) -> ProductSplit:
    """p = 1 split: subtract the ball mean of b under each atom."""
    if abs(decomp.p - 1.0) > 1e-12:
        raise ValueError("split_bmo requires p = 1")
    _validate_terms(decomp, allow_local=local)
    subtractors = []
    for lam, atom in decomp.terms:
        m = ball_mean(b, atom.ball)
        entry = SplitLedgerEntry(
            lam=lam,
            ball=atom.ball,
            subtracted={"type": "mean", "value": m},
            rescale_constant=abs(m) * atom.ball.measure,
            moment_residuals={},
        )
        subtractors.append((m, entry))
    regime = REGIME_P1_LOCAL if local else REGIME_P1
    return _assemble(b, decomp, regime, subtractors)


def split_lipschitz(
    b: GridFunction,
    decomp: AtomicDecomposition,
    order: LipschitzOrder,
    local: bool = False,
) -> ProductSplit:
    """p < 1 split; mean regime for p > n/(n+1), projection regime below."""
    n = b.spec.dim
    gamma = order.gamma
    expected = n * (1.0 / decomp.p - 1.0)
    if abs(gamma - expected) > 1e-12:
        raise ValueError(
            f"gamma must equal n(1/p - 1) = {expected}, got {gamma}"
        )
    _validate_terms(decomp, allow_local=local)
    threshold = n / (n + 1.0)
    if decomp.p >= threshold:
        subtractors = []
        for lam, atom in decomp.terms:
            m = ball_mean(b, atom.ball)
            entry = SplitLedgerEntry(
                lam=lam,
                ball=atom.ball,
                subtracted={"type": "mean", "value": m},
                rescale_constant=abs(m) * atom.ball.measure ** (1.0 / decomp.p),
                moment_residuals={},
            )
            subtractors.append((m, entry))
        regime = REGIME_MEAN_LOCAL if local else REGIME_MEAN
        return _assemble(b, decomp, regime, subtractors)

    k = order.k
    s_min = 2 * k
    subtractors = []
    for idx, (lam, atom) in enumerate(decomp.terms):
        if not atom.local and atom.s < s_min:
            raise ValueError(f"need s >= 2*floor(gamma) = {s_min} (atom {idx})")
        proj = poly_project(b, atom.ball, k)
        m_vals = proj.evaluate(b.spec)
        term = GridFunction(b.spec, _masked(m_vals, atom) * atom.values.values)
        rescale = float(np.max(np.abs(term.values))) * atom.ball.measure ** (
            1.0 / decomp.p
        )
        entry = SplitLedgerEntry(
            lam=lam,
            ball=atom.ball,
            subtracted={
                "type": "projection",
                "degree": k,
                "coefficients": proj.coefficients.tolist(),
            },
            rescale_constant=rescale,
            moment_residuals={}
            if atom.local
            else moment_residuals(term, atom.ball, k),
        )
        subtractors.append((m_vals, entry))
    regime = REGIME_PROJ_LOCAL if local else REGIME_PROJ
    return _assemble(b, decomp, regime, subtractors)


def _masked(vals: np.ndarray, atom: Atom) -> np.ndarray:
    """Restrict polynomial values to the atom's ball (atom is zero outside)."""
    out = np.zeros_like(vals)
    slices = region_slices(atom.spec, atom.ball)
    out[slices] = vals[slices]
    return out


def exp_class_product_bound(
    b: GridFunction, psi: GridFunction, ball: Ball
) -> float:
    """Luxembourg norm of b*psi on a unit ball against the L^1 mass of psi.

    Requires the exponential-class hypothesis: integral over B of exp|b|
    bounded by 2.
    """
    b.require_same_spec(psi)
    if abs(ball.measure - 1.0) > 1e-6:
        raise ValueError("ball must have unit measure")
    exp_mass = integrate(b.with_values(np.exp(np.abs(b.values))), ball)
    if exp_mass > 2.0 * (1.0 + 1e-9):
        raise ValueError("hypothesis violated: integral of exp|b| exceeds 2")
    denom = integrate(psi.with_values(np.abs(psi.values)), ball)
    if denom <= 0:
        raise ValueError("psi vanishes on the ball")
    num = luxembourg_norm(b.with_values(b.values * psi.values), PHI, ball)
    return num / denom


@dataclass(frozen=True)
class SplitReport:
    regime: str
    p: float
    gamma: float | None
    norm_h1_l1: float
    norm_h2_target: float
    b_scale: float
    lambda_sum: float
    lambda_p_sum: float
    c1: float
    c2: float
    grid: dict

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "p": self.p,
            "gamma": self.gamma,
            "norm_h1_L1": self.norm_h1_l1,
            "norm_h2_target": self.norm_h2_target,
            "b_scale": self.b_scale,
            "lambda_sum": self.lambda_sum,
            "lambda_p_sum": self.lambda_p_sum,
            "C1": self.c1,
            "C2": self.c2,
            "grid": self.grid,
        }

    CSV_FIELDS = (
        "regime",
        "p",
        "gamma",
        "norm_h1_L1",
        "norm_h2_target",
        "b_scale",
        "lambda_sum",
        "lambda_p_sum",
        "C1",
        "C2",
        "grid_dim",
        "grid_halfwidth",
        "grid_points",
    )

    def to_csv_row(self) -> list:
        return [
            self.regime,
            self.p,
            "" if self.gamma is None else self.gamma,
            self.norm_h1_l1,
            self.norm_h2_target,
            self.b_scale,
            self.lambda_sum,
            self.lambda_p_sum,
            self.c1,
            self.c2,
            self.grid["dim"],
            self.grid["halfwidth"],
            self.grid["points_per_axis"],
        ]


def _ratio(num: float, denom: float) -> float:
    if denom == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / denom


def verify_split(
    split: ProductSplit,
    b_scale: float,
    decomp: AtomicDecomposition,
    gamma: float | None = None,
) -> SplitReport:
    """Measure ||h1||_1 and the regime's target quasi-norm of h2."""
    local = split.is_local
    h1_norm = lp_norm(split.h1, 1.0)
    if split.regime in _P1_REGIMES:
        h2_norm = hardy_phi_star_quasinorm(split.h2, local=local)
        lam_scale = decomp.lambda_sum
    else:
        h2_norm = hardy_quasinorm(split.h2, decomp.p, local=local)
        lam_scale = decomp.lambda_p_sum
    spec = split.h1.spec
    return SplitReport(
        regime=split.regime,
        p=decomp.p,
        gamma=gamma,
        norm_h1_l1=h1_norm,
        norm_h2_target=h2_norm,
        b_scale=b_scale,
        lambda_sum=decomp.lambda_sum,
        lambda_p_sum=decomp.lambda_p_sum,
        c1=_ratio(h1_norm, b_scale * decomp.lambda_sum),
        c2=_ratio(h2_norm, b_scale * lam_scale),
        grid={
            "dim": spec.dim,
            "halfwidth": spec.halfwidth,
            "points_per_axis": spec.points_per_axis,
        },
    )
