"""Deterministic test-function and decomposition generators.

Every generator is resolution independent: randomness is spent on the
parameters of a closed-form function of x, which is then sampled on whatever
grid is asked for.  That way refinement studies (m -> 2m) see the same
underlying b and atoms, and a fixed seed reproduces a campaign bit for bit.
"""

from __future__ import annotations

import math

import numpy as np

from .atoms import Atom, AtomicDecomposition, make_atom, make_local_atom
from .grid import Ball, GridFunction, GridSpec

__all__ = [
    "constant_field",
    "step_field",
    "regularized_log_field",
    "random_smooth_field",
    "random_lipschitz_field",
    "random_bmo_field",
    "b_field",
    "random_ball",
    "random_decomposition",
    "lipschitz_corpus",
]


def constant_field(spec: GridSpec, value: float = 1.0) -> GridFunction:
    return GridFunction.constant(spec, value)


def step_field(spec: GridSpec, height: float = 1.0) -> GridFunction:
    """height * indicator of {x_1 >= 0}."""
    x = spec.meshes()[0]
    return GridFunction(spec, np.where(x >= 0, float(height), 0.0))


def regularized_log_field(spec: GridSpec, scale: float = 1.0) -> GridFunction:
    """log|x| clipped at grid scale: log(max(|x|, spacing))."""
    meshes = spec.meshes()
    r = np.sqrt(sum(x**2 for x in meshes))
    return GridFunction(spec, scale * np.log(np.maximum(r, spec.spacing)))


def _trig_series(spec: GridSpec, amplitudes, frequencies, phases) -> np.ndarray:
    x = spec.meshes()[0]
    out = np.zeros(spec.shape)
    for a, f, ph in zip(amplitudes, frequencies, phases):
        out += a * np.cos(math.pi * f * x / spec.halfwidth + ph)
    return out


def random_smooth_field(
    spec: GridSpec, rng: np.random.Generator, n_modes: int = 8, amplitude: float = 1.0
) -> GridFunction:
    """Random low-frequency trigonometric series; smooth and bounded."""
    freqs = rng.integers(1, 6, n_modes)
    amps = amplitude * rng.normal(size=n_modes) / n_modes
    phases = rng.uniform(0, 2 * math.pi, n_modes)
    vals = _trig_series(spec, amps, freqs, phases)
    if spec.dim == 2:
        y = spec.meshes()[1]
        vals = vals + amplitude * 0.2 * np.cos(math.pi * y / spec.halfwidth)
    return GridFunction(spec, vals)


def random_lipschitz_field(
    spec: GridSpec,
    rng: np.random.Generator,
    gamma: float,
    target_norm: float | None = None,
    levels: int = 7,
) -> GridFunction:
    """Random self-similar lacunary series with roughness matched to gamma.

    sum_j 2^(-gamma j) cos(2^j pi x / R + phase_j) with random signs and
    phases; its Lambda_gamma norm is finite and roughly scale invariant.
    Rescaling to a target norm is done by the caller (the norm scan is
    expensive) unless target_norm is given, in which case a crude sup-based
    normalization is applied.
    """
    x = spec.meshes()[0]
    vals = np.zeros(spec.shape)
    for j in range(levels):
        sign = rng.choice([-1.0, 1.0])
        phase = rng.uniform(0, 2 * math.pi)
        vals += sign * 2.0 ** (-gamma * j) * np.cos(
            2.0**j * math.pi * x / spec.halfwidth + phase
        )
    if target_norm is not None:
        sup = float(np.max(np.abs(vals)))
        if sup > 0:
            vals *= target_norm / sup
    return GridFunction(spec, vals)


def random_bmo_field(
    spec: GridSpec, rng: np.random.Generator, levels: int = 5
) -> GridFunction:
    """Random dyadic martingale sum: +-coin per dyadic interval and level."""
    x = spec.meshes()[0]
    vals = np.zeros(spec.shape)
    R = spec.halfwidth
    for level in range(levels):
        n_int = 2**level
        signs = rng.choice([-1.0, 1.0], size=n_int)
        width = 2.0 * R / n_int
        idx = np.clip(((x + R) / width).astype(int), 0, n_int - 1)
        vals += signs[idx]
    return GridFunction(spec, vals)


def b_field(
    spec: GridSpec, kind: str, rng: np.random.Generator, **params
) -> GridFunction:
    """Dispatch for the named b generators used by campaigns."""
    if kind == "constant":
        return constant_field(spec, params.get("value", 1.0))
    if kind == "step":
        return step_field(spec, params.get("height", 1.0))
    if kind == "regularized-log":
        return regularized_log_field(spec, params.get("scale", 1.0))
    if kind == "random-smooth":
        return random_smooth_field(spec, rng, amplitude=params.get("amplitude", 1.0))
    if kind == "random-lipschitz":
        return random_lipschitz_field(
            spec,
            rng,
            gamma=params["gamma"],
            target_norm=params.get("target_norm"),
            levels=params.get("levels", 7),
        )
    if kind == "random-bmo":
        return random_bmo_field(spec, rng, levels=params.get("levels", 5))
    raise ValueError(f"unknown b generator {kind!r}")


def random_ball(
    spec: GridSpec,
    rng: np.random.Generator,
    radius_range: tuple[float, float],
) -> Ball:
    """Dyadic-radius ball placed so it stays inside the box."""
    r_lo, r_hi = radius_range
    j_lo = int(math.ceil(math.log2(r_lo) - 1e-12))
    j_hi = int(math.floor(math.log2(r_hi) + 1e-12))
    if j_hi < j_lo:
        raise ValueError("empty dyadic radius range")
    r = 2.0 ** int(rng.integers(j_lo, j_hi + 1))
    free = spec.halfwidth - r
    if free < 0:
        raise ValueError("radius larger than the box")
    center = tuple(rng.uniform(-free, free) for _ in range(spec.dim))
    return Ball(center, r)


def _random_modulation(rng: np.random.Generator, strength: float = 0.3):
    """Mild random polynomial modulation of the atom profile."""
    coeffs = strength * rng.normal(size=3)

    def modulate(*scaled):
        u = scaled[0]
        out = 1.0 + coeffs[0] * u + coeffs[1] * u**2 + coeffs[2] * u**3
        if len(scaled) == 2:
            out = out + 0.5 * coeffs[0] * scaled[1]
        return out

    return modulate


def random_decomposition(
    spec: GridSpec,
    rng: np.random.Generator,
    p: float,
    s: int,
    n_atoms: int = 4,
    radius_range: tuple[float, float] | None = None,
    local: bool = False,
) -> AtomicDecomposition:
    """Random finite decomposition with bump-based atoms and random weights.

    With local=True, large balls (|B| > 1) produce moment-free local atoms,
    mirroring the atomic decomposition of the local Hardy spaces.
    """
    if radius_range is None:
        hi = spec.halfwidth / 2.0
        lo = max(8 * spec.spacing, hi / 16.0)
        radius_range = (lo, hi)
    terms = []
    for _ in range(n_atoms):
        ball = random_ball(spec, rng, radius_range)
        modulate = _random_modulation(rng)
        if local and ball.measure > 1.0:
            atom = make_local_atom(ball, p, math.inf, spec, modulate=modulate)
        else:
            atom = make_atom(ball, p, s, spec, modulate=modulate)
        lam = float(rng.normal())
        terms.append((lam, atom))
    return AtomicDecomposition(p=p, terms=tuple(terms))


def lipschitz_corpus(
    spec: GridSpec, gamma: float, count: int, rng: np.random.Generator
) -> list[GridFunction]:
    """Corpus for Campanato studies: cusps |x - c|^gamma and lacunary series.

    Both families are roughness-critical for Lambda_gamma, so the measured
    Campanato constant does not decay with the ball radius.
    """
    out: list[GridFunction] = []
    meshes = spec.meshes()
    for i in range(count):
        if i % 2 == 0:
            c = rng.uniform(-spec.halfwidth / 2, spec.halfwidth / 2)
            r = np.sqrt(sum((x - (c if ax == 0 else 0.0)) ** 2 for ax, x in enumerate(meshes)))
            out.append(GridFunction(spec, r**gamma))
        else:
            out.append(random_lipschitz_field(spec, rng, gamma))
    return out
