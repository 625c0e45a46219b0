"""Uniform tensor grids, finite differences, trapezoid quadrature, cutoffs.

This is the numerical substrate for every verification in the package:
fields sampled on a uniform box grid, a second-order gradient, a
tensor-product trapezoidal integral with an excision mask for singular
integrands, and a C^2 radial cutoff with analytic derivatives.

Grid point iteration is row-major (C order): the last axis varies fastest,
matching ``numpy.reshape`` of an ``(r_0, ..., r_{n-1})`` array to ``(N,)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

DEFAULT_MAX_POINTS = 2**25


@dataclass(frozen=True)
class GridDomain:
    """Uniform grid on a box, spacing h_i = (hi_i - lo_i) / (res_i - 1)."""

    box: tuple[tuple[float, float], ...]
    resolution: tuple[int, ...]

    def __post_init__(self):
        if len(self.box) != len(self.resolution):
            raise ValueError("box and resolution must have equal length")
        if self.dim < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dim}")
        for (lo, hi) in self.box:
            if not (lo < hi):
                raise ValueError(f"degenerate box axis [{lo}, {hi}]")
        for r in self.resolution:
            if r < 3:
                raise ValueError(f"resolution must be >= 3 per axis, got {r}")

    @property
    def dim(self) -> int:
        return len(self.box)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(
            (hi - lo) / (r - 1) for (lo, hi), r in zip(self.box, self.resolution)
        )

    @property
    def npoints(self) -> int:
        return int(np.prod(self.resolution))

    @property
    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(
            np.linspace(lo, hi, r) for (lo, hi), r in zip(self.box, self.resolution)
        )

    def points(self) -> np.ndarray:
        """All grid points as an (N, n) array in row-major order."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)

    def reshape(self, flat: np.ndarray) -> np.ndarray:
        return flat.reshape(self.resolution + flat.shape[1:])


def make_grid(
    n: int,
    box: Sequence[Sequence[float]],
    resolution: int | Sequence[int],
    max_points: int = DEFAULT_MAX_POINTS,
) -> GridDomain:
    """Build an n-dimensional uniform grid over `box`.

    `resolution` is points per axis (scalar broadcasts to all axes).
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    box_t = tuple((float(lo), float(hi)) for lo, hi in box)
    if len(box_t) != n:
        raise ValueError(f"box has {len(box_t)} axes, expected {n}")
    res = (
        tuple([int(resolution)] * n)
        if np.isscalar(resolution)
        else tuple(int(r) for r in resolution)
    )
    total = int(np.prod(res))
    if total > max_points:
        raise ValueError(f"grid would hold {total} points, above cap {max_points}")
    return GridDomain(box=box_t, resolution=res)


@dataclass
class ScalarField:
    """Per-point scalar values on a grid; `excised` marks points dropped
    from quadrature (they contribute 0) and poisoned for differencing."""

    grid: GridDomain
    values: np.ndarray
    excised: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if self.values.shape[0] != self.grid.npoints:
            raise ValueError("value count does not match grid point count")
        if self.excised is not None:
            self.excised = np.asarray(self.excised, dtype=bool).reshape(-1)
            if self.excised.shape[0] != self.grid.npoints:
                raise ValueError("mask length does not match grid point count")
        valid = self.values if self.excised is None else self.values[~self.excised]
        if valid.size and not np.all(np.isfinite(valid)):
            raise ValueError("non-finite values at unmasked points")

    def to_csv(self, path) -> None:
        _field_to_csv(self.grid, self.values[:, None], self.excised, path, ["value"])


@dataclass
class VectorField:
    grid: GridDomain
    values: np.ndarray
    excised: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n = self.grid.dim
        self.values = self.values.reshape(-1, n)
        if self.values.shape[0] != self.grid.npoints:
            raise ValueError("value count does not match grid point count")
        if self.excised is not None:
            self.excised = np.asarray(self.excised, dtype=bool).reshape(-1)

    def component(self, i: int) -> ScalarField:
        return ScalarField(self.grid, self.values[:, i], self.excised)

    def to_csv(self, path) -> None:
        names = [f"v{i+1}" for i in range(self.grid.dim)]
        _field_to_csv(self.grid, self.values, self.excised, path, names)


def _field_to_csv(grid, values, excised, path, value_names):
    pts = grid.points()
    cols = [pts, values]
    header = [f"x{i+1}" for i in range(grid.dim)] + list(value_names)
    if excised is not None:
        cols.append(excised.astype(float)[:, None])
        header.append("excised")
    data = np.hstack(cols)
    np.savetxt(path, data, delimiter=",", header=",".join(header), comments="")


def field_from_function(
    grid: GridDomain, fn: Callable[[np.ndarray], np.ndarray], excised=None
) -> ScalarField:
    """Sample fn (vectorized over (N, n) points) into a ScalarField."""
    vals = np.asarray(fn(grid.points()), dtype=float).reshape(-1)
    if excised is not None:
        vals = np.where(excised, 0.0, vals)
    return ScalarField(grid, vals, excised)


def _dilate_mask(mask: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Poison every point whose difference stencil touches a masked point."""
    m = mask.reshape(shape)
    out = m.copy()
    for ax in range(len(shape)):
        sl_all = [slice(None)] * len(shape)

        def shifted(offset):
            sl_src = list(sl_all)
            sl_dst = list(sl_all)
            if offset > 0:
                sl_src[ax] = slice(offset, None)
                sl_dst[ax] = slice(None, -offset)
            else:
                sl_src[ax] = slice(None, offset)
                sl_dst[ax] = slice(-offset, None)
            res = np.zeros_like(m)
            res[tuple(sl_dst)] = m[tuple(sl_src)]
            return res

        out |= shifted(1) | shifted(-1)
        # boundary one-sided stencils reach two points inward
        first = [slice(None)] * len(shape)
        first[ax] = slice(0, 1)
        third = [slice(None)] * len(shape)
        third[ax] = slice(2, 3)
        out[tuple(first)] |= m[tuple(third)]
        last = [slice(None)] * len(shape)
        last[ax] = slice(-1, None)
        third_last = [slice(None)] * len(shape)
        third_last[ax] = slice(-3, -2)
        out[tuple(last)] |= m[tuple(third_last)]
    return out.reshape(-1)


def fd_gradient(field: ScalarField) -> VectorField:
    """Second-order gradient: central differences inside, one-sided second
    order on the boundary. Exact on affine fields."""
    grid = field.grid
    vals = grid.reshape(field.values).copy()
    if field.excised is not None:
        vals[field.excised.reshape(grid.resolution)] = 0.0  # poisoned below
    grads = np.gradient(vals, *grid.spacing, edge_order=2)
    if grid.dim == 1:
        grads = [grads]
    out = np.stack([g.reshape(-1) for g in grads], axis=-1)
    excised = None
    if field.excised is not None:
        excised = _dilate_mask(field.excised, grid.resolution)
        out[excised] = 0.0
    return VectorField(grid, out, excised)


def integrate(field: ScalarField) -> float:
    """Tensor-product trapezoidal rule; masked points contribute 0."""
    grid = field.grid
    if field.excised is not None and bool(np.all(field.excised)):
        raise ValueError("cannot integrate an all-masked field")
    w = np.ones(grid.resolution)
    for ax, (h, r) in enumerate(zip(grid.spacing, grid.resolution)):
        wax = np.full(r, h)
        wax[0] = wax[-1] = h / 2
        shape = [1] * grid.dim
        shape[ax] = r
        w = w * wax.reshape(shape)
    vals = grid.reshape(field.values.copy())
    if field.excised is not None:
        vals[field.excised.reshape(grid.resolution)] = 0.0
    return float(np.sum(w * vals))


def excised_volume(field: ScalarField) -> float:
    """Quadrature weight carried by the masked points (reported volume)."""
    if field.excised is None or not np.any(field.excised):
        return 0.0
    ind = ScalarField(field.grid, field.excised.astype(float))
    return integrate(ind)


@dataclass(frozen=True)
class Cutoff:
    """Radial C^2 cutoff: 1 on |x-c| <= r0, 0 on |x-c| >= r1, quintic
    smoothstep transition in between (value and first two derivatives
    vanish at r1; plateau is exact)."""

    center: tuple[float, ...]
    r0: float
    r1: float

    def __post_init__(self):
        if not (0 < self.r0 < self.r1):
            raise ValueError(f"need 0 < r0 < r1, got r0={self.r0}, r1={self.r1}")

    def _t(self, r: np.ndarray) -> np.ndarray:
        return np.clip((r - self.r0) / (self.r1 - self.r0), 0.0, 1.0)

    def profile(self, r) -> np.ndarray:
        t = self._t(np.asarray(r, dtype=float))
        return 1.0 - t**3 * (10.0 - 15.0 * t + 6.0 * t**2)

    def dprofile(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        t = self._t(r)
        inside = (r > self.r0) & (r < self.r1)
        return np.where(inside, -30.0 * t**2 * (1.0 - t) ** 2 / (self.r1 - self.r0), 0.0)

    def d2profile(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        t = self._t(r)
        inside = (r > self.r0) & (r < self.r1)
        d2 = -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (self.r1 - self.r0) ** 2
        return np.where(inside, d2, 0.0)

    def _radii(self, points: np.ndarray) -> np.ndarray:
        d = np.asarray(points, dtype=float) - np.asarray(self.center)
        return np.sqrt(np.sum(d * d, axis=-1))

    def value(self, points: np.ndarray) -> np.ndarray:
        return self.profile(self._radii(points))

    def gradient(self, points: np.ndarray) -> np.ndarray:
        """Analytic gradient eta'(r) * (x - c)/r, zero on the plateau."""
        d = np.asarray(points, dtype=float) - np.asarray(self.center)
        r = np.sqrt(np.sum(d * d, axis=-1))
        dp = self.dprofile(r)
        safe_r = np.where(r > 0, r, 1.0)
        return (dp / safe_r)[..., None] * d

    def support_inside(self, box: Sequence[Sequence[float]]) -> bool:
        return all(
            lo <= c - self.r1 and c + self.r1 <= hi
            for c, (lo, hi) in zip(self.center, box)
        )


def smooth_cutoff(center: Sequence[float], r0: float, r1: float) -> Cutoff:
    """C^2 radial cutoff equal to 1 inside r0 and 0 outside r1."""
    return Cutoff(center=tuple(float(c) for c in center), r0=float(r0), r1=float(r1))
