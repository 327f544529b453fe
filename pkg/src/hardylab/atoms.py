"""(p, q, s)-atoms: validation, construction and atomic decompositions.

Atoms are built from a smooth bump on the ball: the discrete L^2(B)
projection onto polynomials of degree <= s is subtracted (exact discrete
moment cancellation), then the result is rescaled so the size condition
||a||_q <= |B|^(1/q - 1/p) is tight.  Large-ball "local" atoms skip the
moment step.  Decompositions are inputs assembled by helpers, not computed
from arbitrary functions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import (
    Ball,
    GridFunction,
    GridSpec,
    lp_norm,
    region_node_count,
    region_slices,
    region_weights,
)
from .maximal import bump_profile
from .projection import multi_indices, poly_project

__all__ = [
    "Atom",
    "AtomicDecomposition",
    "AtomReport",
    "moment_residuals",
    "moment_tolerance",
    "validate_atom",
    "make_atom",
    "make_local_atom",
    "synthesize",
    "haar_decomposition",
    "save_decomposition",
    "load_decomposition",
]

MOMENT_SLACK = 1e-10


@dataclass(frozen=True)
class Atom:
    """A GridFunction tagged with its ball and (p, q, s) metadata."""

    values: GridFunction
    ball: Ball
    p: float
    q: float
    s: int
    local: bool = False

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValueError("p must lie in (0, 1]")
        if not self.q > self.p:
            raise ValueError("q must exceed p")
        if self.s < 0:
            raise ValueError("s must be a nonnegative integer")

    @property
    def spec(self) -> GridSpec:
        return self.values.spec

    @property
    def size_bound(self) -> float:
        """|B|^(1/q - 1/p) with the analytic ball measure."""
        inv_q = 0.0 if self.q == math.inf else 1.0 / self.q
        return self.ball.measure ** (inv_q - 1.0 / self.p)


@dataclass(frozen=True)
class AtomicDecomposition:
    """Exponent p with a finite ordered list of (lambda_j, atom_j) pairs."""

    p: float
    terms: tuple[tuple[float, Atom], ...]

    def __post_init__(self):
        terms = tuple((float(lam), atom) for lam, atom in self.terms)
        object.__setattr__(self, "terms", terms)
        for _, atom in terms:
            if abs(atom.p - self.p) > 1e-12:
                raise ValueError("atom exponent does not match decomposition")
        specs = {atom.spec for _, atom in terms}
        if len(specs) > 1:
            raise ValueError("atoms live on different grids")

    @property
    def lambda_sum(self) -> float:
        return sum(abs(lam) for lam, _ in self.terms)

    @property
    def lambda_p_sum(self) -> float:
        return sum(abs(lam) ** self.p for lam, _ in self.terms) ** (1.0 / self.p)


def moment_tolerance(atom_sup: float, ball: Ball, order: int) -> float:
    """Scale-aware moment tolerance: slack * ||a||_inf * |B| * r^|alpha|."""
    return MOMENT_SLACK * atom_sup * ball.measure * ball.radius**order


def moment_residuals(values: GridFunction, ball: Ball, s: int) -> dict:
    """Discrete moments of values * (x - x_B)^alpha for |alpha| <= s."""
    spec = values.spec
    slices = region_slices(spec, ball)
    w = region_weights(spec, slices)
    axes = [spec.axis()[sl] for sl in slices]
    if spec.dim == 1:
        coords = [axes[0]]
    else:
        coords = list(np.meshgrid(axes[0], axes[1], indexing="ij"))
    centered = [x - c for x, c in zip(coords, ball.center)]
    out = {}
    for alpha in multi_indices(spec.dim, s):
        term = values.values[slices] * w
        for u, a in zip(centered, alpha):
            if a:
                term = term * u**a
        out[alpha] = float(np.sum(term))
    return out


@dataclass(frozen=True)
class AtomReport:
    support_leakage: float
    size_ratio: float
    moment_residuals: dict
    moment_slacks: dict
    passed: bool
    failures: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "support_leakage": self.support_leakage,
            "size_ratio": self.size_ratio,
            "moment_residuals": {str(k): v for k, v in self.moment_residuals.items()},
            "moment_slacks": {str(k): v for k, v in self.moment_slacks.items()},
            "passed": self.passed,
            "failures": list(self.failures),
        }


def validate_atom(atom: Atom) -> AtomReport:
    """Report support, size and moment conditions with their measured slack."""
    spec = atom.spec
    failures: list[str] = []

    outside = np.array(atom.values.values, copy=True)
    slices = region_slices(spec, atom.ball)
    outside[slices] = 0.0
    sup = float(np.max(np.abs(atom.values.values)))
    leakage = float(np.max(np.abs(outside)))
    if leakage > 1e-14 * max(sup, 1.0):
        failures.append("support")

    size = lp_norm(atom.values, atom.q, atom.ball)
    size_ratio = size / atom.size_bound if atom.size_bound > 0 else math.inf
    if size_ratio > 1.0 + 1e-9:
        failures.append("size")

    residuals: dict = {}
    slacks: dict = {}
    if atom.local:
        if atom.ball.measure <= 1.0:
            failures.append("local atom needs a large ball")
    else:
        residuals = moment_residuals(atom.values, atom.ball, atom.s)
        for alpha, res in residuals.items():
            tol = moment_tolerance(sup, atom.ball, sum(alpha))
            slacks[alpha] = tol
            if abs(res) > tol:
                failures.append(f"moment {alpha}")

    return AtomReport(
        support_leakage=leakage,
        size_ratio=size_ratio,
        moment_residuals=residuals,
        moment_slacks=slacks,
        passed=not failures,
        failures=tuple(failures),
    )


def _bump_on_ball(spec: GridSpec, ball: Ball, modulate=None) -> np.ndarray:
    """Smooth bump supported strictly inside the ball, optionally modulated."""
    slices = region_slices(spec, ball)
    axes = [spec.axis()[sl] for sl in slices]
    if spec.dim == 1:
        coords = [axes[0]]
    else:
        coords = list(np.meshgrid(axes[0], axes[1], indexing="ij"))
    scaled = [(x - c) / ball.radius for x, c in zip(coords, ball.center)]
    r = np.sqrt(sum(u**2 for u in scaled)) / math.sqrt(spec.dim)
    local = bump_profile(r)
    if modulate is not None:
        local = local * modulate(*scaled)
    vals = np.zeros(spec.shape)
    vals[slices] = local
    return vals


def make_atom(
    ball: Ball,
    p: float,
    s: int,
    spec: GridSpec,
    modulate=None,
) -> Atom:
    """Construct a (p, inf, s)-atom on the ball with tight size condition."""
    if region_node_count(spec, ball) < (s + 2) ** spec.dim:
        raise ValueError("under-resolved ball")
    base = GridFunction(spec, _bump_on_ball(spec, ball, modulate))
    proj = poly_project(base, ball, s)
    resid = np.array(base.values, copy=True)
    slices = region_slices(spec, ball)
    resid[slices] -= proj.evaluate(spec)[slices]
    sup = float(np.max(np.abs(resid)))
    if sup <= 0:
        raise ValueError("degenerate profile: projection removed the bump")
    target = ball.measure ** (-1.0 / p)
    vals = resid * (target / sup)
    return Atom(
        values=GridFunction(spec, vals), ball=ball, p=p, q=math.inf, s=s
    )


def make_local_atom(
    ball: Ball,
    p: float,
    q: float,
    spec: GridSpec,
    modulate=None,
) -> Atom:
    """Large-ball atom with tight size condition and no moment subtraction."""
    if ball.measure <= 1.0:
        raise ValueError("not a large ball")
    vals = _bump_on_ball(spec, ball, modulate)
    f = GridFunction(spec, vals)
    inv_q = 0.0 if q == math.inf else 1.0 / q
    bound = ball.measure ** (inv_q - 1.0 / p)
    current = lp_norm(f, q, ball)
    if current <= 0:
        raise ValueError("under-resolved ball")
    return Atom(
        values=GridFunction(spec, vals * (bound / current)),
        ball=ball,
        p=p,
        q=q,
        s=0,
        local=True,
    )


def synthesize(decomp: AtomicDecomposition, spec: GridSpec | None = None) -> GridFunction:
    """Pointwise sum of lambda_j * a_j in term order."""
    if not decomp.terms:
        if spec is None:
            raise ValueError("empty decomposition needs an explicit grid spec")
        return GridFunction.zeros(spec)
    first_spec = decomp.terms[0][1].spec
    if spec is not None and spec != first_spec:
        raise ValueError("grid spec mismatch")
    out = np.zeros(first_spec.shape)
    for lam, atom in decomp.terms:
        out += lam * atom.values.values
    return GridFunction(first_spec, out)


def haar_decomposition(
    f: GridFunction, p: float, levels: int
) -> AtomicDecomposition:
    """Haar-type expansion of a 1d signal into mean-zero two-level atoms.

    Each dyadic interval contributes a step atom (+1 left half, -1 right
    half, discretely mean-corrected) normalized to a (p, inf, 0)-atom; the
    coefficient is the weighted Haar inner product against f.  This is a
    helper for building test decompositions, not an exact reconstruction.
    """
    if f.spec.dim != 1:
        raise ValueError("haar_decomposition supports dim 1 only")
    spec = f.spec
    R = spec.halfwidth
    terms: list[tuple[float, Atom]] = []
    w = spec.weights()
    x = spec.axis()
    for level in range(levels):
        n_int = 2**level
        width = 2.0 * R / n_int
        for i in range(n_int):
            lo = -R + i * width
            mid = lo + width / 2.0
            ball = Ball((lo + width / 2.0,), width / 2.0)
            if region_node_count(spec, ball) < 4:
                continue
            raw = np.where(x < mid, 1.0, -1.0)
            slices = region_slices(spec, ball)
            shape = np.zeros(spec.shape)
            shape[slices] = raw[slices]
            wsl = w[slices]
            shape[slices] -= np.sum(wsl * shape[slices]) / np.sum(wsl)
            sup = float(np.max(np.abs(shape)))
            if sup == 0:
                continue
            atom_vals = shape * (ball.measure ** (-1.0 / p) / sup)
            atom = Atom(GridFunction(spec, atom_vals), ball, p, math.inf, 0)
            # weighted projection coefficient of f on the normalized shape
            denom = float(np.sum(w * atom_vals**2))
            lam = float(np.sum(w * f.values * atom_vals)) / denom if denom else 0.0
            if lam != 0.0:
                terms.append((lam, atom))
    return AtomicDecomposition(p=p, terms=tuple(terms))


def save_decomposition(decomp: AtomicDecomposition, basepath) -> None:
    """Write <base>.json plus one .npy value file per atom."""
    base = Path(basepath)
    base.parent.mkdir(parents=True, exist_ok=True)
    entries = []
    for idx, (lam, atom) in enumerate(decomp.terms):
        ref = f"{base.name}_atom{idx:04d}.npy"
        np.save(base.parent / ref, atom.values.values)
        entries.append(
            {
                "lambda": lam,
                "ball": {"center": list(atom.ball.center), "radius": atom.ball.radius},
                "p": atom.p,
                "q": None if atom.q == math.inf else atom.q,
                "s": atom.s,
                "local": atom.local,
                "values_ref": ref,
            }
        )
    spec = decomp.terms[0][1].spec if decomp.terms else None
    doc = {
        "p": decomp.p,
        "grid": None
        if spec is None
        else {
            "dim": spec.dim,
            "halfwidth": spec.halfwidth,
            "points_per_axis": spec.points_per_axis,
        },
        "terms": entries,
    }
    base.with_suffix(".json").write_text(json.dumps(doc, indent=2))


def load_decomposition(basepath) -> AtomicDecomposition:
    base = Path(basepath)
    doc = json.loads(base.with_suffix(".json").read_text())
    grid = doc["grid"]
    spec = None
    if grid is not None:
        spec = GridSpec(grid["dim"], grid["halfwidth"], grid["points_per_axis"])
    terms = []
    for entry in doc["terms"]:
        values = np.load(base.parent / entry["values_ref"])
        atom = Atom(
            values=GridFunction(spec, values),
            ball=Ball(tuple(entry["ball"]["center"]), entry["ball"]["radius"]),
            p=entry["p"],
            q=math.inf if entry["q"] is None else entry["q"],
            s=entry["s"],
            local=entry["local"],
        )
        terms.append((entry["lambda"], atom))
    return AtomicDecomposition(p=doc["p"], terms=tuple(terms))
