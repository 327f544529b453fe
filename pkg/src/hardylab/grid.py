"""Uniform-grid function representation, geometric regions and quadrature.

Everything downstream (maximal operators, Orlicz norms, oscillation
statistics, atoms, product splits) is built on the types here: a function
sampled on a uniform grid over a centered box, sup-norm balls and unit
lattice cubes, and product-trapezoid quadrature restricted to regions.

Conventions
-----------
* The box is ``[-R, R]^n`` with ``n in {1, 2}``; nodes are
  ``x_i = -R + i * spacing`` per axis with ``spacing = 2R / (m - 1)``.
* Balls are sup-norm balls (axis-aligned boxes), so 1d and 2d share code
  and the analytic measure ``(2r)^n`` is exact.
* Wherever a measure divides an integral (means), the *quadrature* measure
  (sum of node weights in the region) is used, so means of constants are
  exact.  The analytic measure is used for scale factors such as
  ``|B|^{1/q - 1/p}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "GridSpec",
    "GridFunction",
    "Ball",
    "CubeIndex",
    "region_slices",
    "region_weights",
    "region_measure",
    "integrate",
    "ball_mean",
    "lp_norm",
    "sup_norm",
    "cube_indices",
    "save_gridfunction",
    "load_gridfunction",
]

# slack, in units of the grid spacing, when deciding whether a node lies
# inside a ball; absorbs roundoff from dyadic center/radius arithmetic
_INDEX_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid over the box [-halfwidth, halfwidth]^dim."""

    dim: int
    halfwidth: float
    points_per_axis: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if not self.halfwidth > 0:
            raise ValueError("halfwidth must be positive")
        if self.points_per_axis < 16:
            raise ValueError("points_per_axis must be >= 16")

    @property
    def spacing(self) -> float:
        return 2.0 * self.halfwidth / (self.points_per_axis - 1)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def box_measure(self) -> float:
        return (2.0 * self.halfwidth) ** self.dim

    def axis(self) -> np.ndarray:
        return np.linspace(-self.halfwidth, self.halfwidth, self.points_per_axis)

    def axis_weights(self) -> np.ndarray:
        """1d trapezoid weights: spacing inside, half at the box edges."""
        w = np.full(self.points_per_axis, self.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def weights(self) -> np.ndarray:
        """Product-trapezoid weights with the grid's shape."""
        w = self.axis_weights()
        if self.dim == 1:
            return w
        return np.multiply.outer(w, w)

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays, one per axis, each with the grid's shape."""
        ax = self.axis()
        if self.dim == 1:
            return (ax,)
        return tuple(np.meshgrid(ax, ax, indexing="ij"))


@dataclass(frozen=True)
class GridFunction:
    """A real-valued function sampled on a GridSpec."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.spec.shape:
            raise ValueError(
                f"values shape {vals.shape} does not match grid shape {self.spec.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, spec: GridSpec, fn) -> "GridFunction":
        return cls(spec, fn(*spec.meshes()))

    @classmethod
    def constant(cls, spec: GridSpec, c: float) -> "GridFunction":
        return cls(spec, np.full(spec.shape, float(c)))

    @classmethod
    def zeros(cls, spec: GridSpec) -> "GridFunction":
        return cls(spec, np.zeros(spec.shape))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.spec, values)

    def require_same_spec(self, other: "GridFunction") -> None:
        if self.spec != other.spec:
            raise ValueError("grid functions live on different grids")


@dataclass(frozen=True)
class Ball:
    """Sup-norm ball: the axis-aligned box of the given center and radius."""

    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        center = tuple(float(c) for c in np.atleast_1d(self.center))
        object.__setattr__(self, "center", center)
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def measure(self) -> float:
        """Analytic measure (2r)^n."""
        return (2.0 * self.radius) ** self.dim

    def dilate(self, factor: float) -> "Ball":
        return Ball(tuple(factor * c for c in self.center), factor * self.radius)

    def translate(self, shift) -> "Ball":
        shift = np.atleast_1d(shift)
        return Ball(tuple(c + s for c, s in zip(self.center, shift)), self.radius)


@dataclass(frozen=True)
class CubeIndex:
    """The unit cube j + Q, Q the unit cube centered at the origin."""

    j: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "j", tuple(int(v) for v in np.atleast_1d(self.j)))

    @property
    def dim(self) -> int:
        return len(self.j)


def _ball_axis_slice(spec: GridSpec, center: float, radius: float) -> slice:
    step = spec.spacing
    lo = (center - radius + spec.halfwidth) / step
    hi = (center + radius + spec.halfwidth) / step
    i_lo = max(0, int(math.ceil(lo - _INDEX_TOL)))
    i_hi = min(spec.points_per_axis - 1, int(math.floor(hi + _INDEX_TOL)))
    return slice(i_lo, i_hi + 1)


def _cube_axis_slice(spec: GridSpec, j: int) -> slice:
    # nodes are assigned to cubes by nearest-integer binning, which
    # partitions the box exactly (no node counted twice in the cube sum)
    owners = np.floor(spec.axis() + 0.5).astype(int)
    i_lo = int(np.searchsorted(owners, j, side="left"))
    i_hi = int(np.searchsorted(owners, j, side="right"))
    return slice(i_lo, i_hi)


def region_slices(spec: GridSpec, region) -> tuple[slice, ...]:
    """Per-axis index slices of the in-box part of a Ball or CubeIndex."""
    if isinstance(region, Ball):
        if region.dim != spec.dim:
            raise ValueError("region dimension does not match grid")
        slices = tuple(
            _ball_axis_slice(spec, c, region.radius) for c in region.center
        )
    elif isinstance(region, CubeIndex):
        if region.dim != spec.dim:
            raise ValueError("region dimension does not match grid")
        slices = tuple(_cube_axis_slice(spec, j) for j in region.j)
    else:
        raise TypeError(f"unsupported region type {type(region).__name__}")
    if any(s.stop <= s.start for s in slices):
        raise ValueError("empty region")
    return slices


def region_weights(spec: GridSpec, slices: tuple[slice, ...]) -> np.ndarray:
    w = spec.axis_weights()
    if spec.dim == 1:
        return w[slices[0]]
    return np.multiply.outer(w[slices[0]], w[slices[1]])


def region_measure(spec: GridSpec, region) -> float:
    """Quadrature measure of a region: sum of in-region node weights."""
    slices = region_slices(spec, region)
    return float(np.sum(region_weights(spec, slices)))


def region_node_count(spec: GridSpec, region) -> int:
    slices = region_slices(spec, region)
    n = 1
    for s in slices:
        n *= s.stop - s.start
    return n


def integrate(f: GridFunction, region=None) -> float:
    """Quadrature integral of f over the box or over a region's in-box part."""
    if region is None:
        return float(np.sum(f.spec.weights() * f.values))
    slices = region_slices(f.spec, region)
    w = region_weights(f.spec, slices)
    return float(np.sum(w * f.values[slices]))


def ball_mean(f: GridFunction, ball: Ball) -> float:
    """Mean of f on a ball, with the quadrature measure in the denominator."""
    slices = region_slices(f.spec, ball)
    if region_node_count(f.spec, ball) < 2:
        raise ValueError("under-resolved ball")
    vals = f.values[slices]
    vmin, vmax = float(np.min(vals)), float(np.max(vals))
    if vmin == vmax:
        # means of constants are exact by contract, not up to rounding
        return vmax
    w = region_weights(f.spec, slices)
    return float(np.sum(w * vals) / np.sum(w))


def lp_norm(f: GridFunction, p: float, region=None) -> float:
    """(integral of |f|^p)^(1/p); a quasi-norm for p < 1; sup norm for p = inf."""
    if p == math.inf:
        return sup_norm(f, region)
    if not p > 0:
        raise ValueError("p must be positive")
    if region is None:
        total = float(np.sum(f.spec.weights() * np.abs(f.values) ** p))
    else:
        slices = region_slices(f.spec, region)
        w = region_weights(f.spec, slices)
        total = float(np.sum(w * np.abs(f.values[slices]) ** p))
    return total ** (1.0 / p)


def sup_norm(f: GridFunction, region=None) -> float:
    if region is None:
        return float(np.max(np.abs(f.values)))
    slices = region_slices(f.spec, region)
    return float(np.max(np.abs(f.values[slices])))


def cube_indices(spec: GridSpec) -> list[CubeIndex]:
    """All unit lattice cubes owning at least one grid node, in raster order."""
    owners = np.floor(spec.axis() + 0.5).astype(int)
    js = np.unique(owners)
    if spec.dim == 1:
        return [CubeIndex((int(j),)) for j in js]
    return [CubeIndex((int(j1), int(j2))) for j1 in js for j2 in js]


def save_gridfunction(f: GridFunction, basepath) -> None:
    """Write <base>.json header and <base>.npy values; bit-exact round trip."""
    base = Path(basepath)
    header = {
        "dim": f.spec.dim,
        "halfwidth": f.spec.halfwidth,
        "points_per_axis": f.spec.points_per_axis,
    }
    base.with_suffix(".json").write_text(json.dumps(header, indent=2))
    np.save(base.with_suffix(".npy"), f.values)


def load_gridfunction(basepath) -> GridFunction:
    base = Path(basepath)
    header = json.loads(base.with_suffix(".json").read_text())
    spec = GridSpec(
        dim=int(header["dim"]),
        halfwidth=float(header["halfwidth"]),
        points_per_axis=int(header["points_per_axis"]),
    )
    values = np.load(base.with_suffix(".npy"))
    return GridFunction(spec, values)
