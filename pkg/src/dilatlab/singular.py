"""Zero-set location, box-counting dimension, and Sobolev-norm diagnostics.

Box counting stands in for Hausdorff dimension as a computable upper-bound
proxy: the fitted slope of log N(delta) against log(1/delta) over dyadic
box sizes, with the fit residual reported so weak fits are visible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .identities import EstimateReport
from .mappings import Mapping
from .tensorgrid import GridDomain, ScalarField, excised_volume, fd_gradient, integrate


@dataclass
class PointCloud:
    """Deduplicated sample of an approximate preimage set."""

    n: int
    points: np.ndarray  # (N, n)
    tolerance: float
    target: np.ndarray | None = None

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def to_csv(self, path) -> None:
        header = ",".join(f"x{i+1}" for i in range(self.n))
        np.savetxt(path, self.points, delimiter=",", header=header, comments="")


@dataclass
class DimensionEstimate:
    scales: list
    counts: list
    dimension: float
    fit_residual: float
    empty: bool = False

    def to_dict(self) -> dict:
        return {
            "scales": [float(s) for s in self.scales],
            "counts": [int(c) for c in self.counts],
            "dimension": self.dimension,
            "fit_residual": self.fit_residual,
            "empty": self.empty,
        }


def zero_set(
    F: Mapping,
    grid: GridDomain,
    tol: float,
    target=None,
) -> PointCloud:
    """Grid points with |F(x) - target| <= tol, sharpened by one bisection
    pass per occupied cell (coordinate-wise half-step descent).

    `target` defaults to the origin; preimages of other points are reachable
    through it.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    pts = grid.points()
    y0 = np.zeros(F.n) if target is None else np.asarray(target, dtype=float)
    dist = np.linalg.norm(F(pts) - y0, axis=1)
    hits = pts[dist <= tol]
    if hits.shape[0] == 0:
        return PointCloud(F.n, hits, tol, y0)
    # one bisection pass: move each hit half a cell along any axis that
    # brings |F - target| down
    h = np.asarray(grid.spacing)
    current = hits.copy()
    best = np.linalg.norm(F(current) - y0, axis=1)
    for ax in range(F.n):
        for sign in (+1.0, -1.0):
            cand = current.copy()
            cand[:, ax] += sign * h[ax] / 2
            d = np.linalg.norm(F(cand) - y0, axis=1)
            better = d < best
            current[better] = cand[better]
            best = np.where(better, d, best)
    # dedupe on the half-step lattice
    lattice = np.round((current - current.min(axis=0)) / (h / 2)).astype(np.int64)
    _, keep = np.unique(lattice, axis=0, return_index=True)
    return PointCloud(F.n, current[np.sort(keep)], tol, y0)


def box_counting_dimension(cloud: PointCloud, scales) -> DimensionEstimate:
    """Least-squares slope of log N(delta) versus log(1/delta).

    An empty cloud reports dimension 0 with the EMPTY flag (so catalog
    sweeps never abort); fewer than 3 scales is an error.
    """
    scales = sorted(float(s) for s in scales)
    if len(scales) < 3:
        raise ValueError("need at least 3 scales")
    if len(set(scales)) != len(scales) or scales[0] <= 0:
        raise ValueError("scales must be positive and distinct")
    if cloud.size == 0:
        return DimensionEstimate(scales, [0] * len(scales), 0.0, 0.0, empty=True)
    origin = cloud.points.min(axis=0)
    extent = cloud.points.max(axis=0) - origin
    counts = []
    for delta in scales:
        # partition of the bounding box; the closing edge joins the last bin
        nbins = np.maximum(1, np.ceil(extent / delta - 1e-12).astype(np.int64))
        idx = np.floor((cloud.points - origin) / delta).astype(np.int64)
        idx = np.minimum(idx, nbins - 1)
        counts.append(int(np.unique(idx, axis=0).shape[0]))
    x = np.log(1.0 / np.asarray(scales))
    y = np.log(np.asarray(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(slope * x + intercept - y)))
    return DimensionEstimate(scales, counts, float(slope), residual)


def sobolev_log_norm(
    F: Mapping,
    grid: GridDomain,
    q: float,
    delta: float | None = None,
) -> EstimateReport:
    """Quadrature of |grad log |F||^q off a delta-neighborhood of the zero
    set, reported at delta and delta/2.

    A stable pair is finiteness evidence; growth ~ log(1/delta) between the
    two radii is divergence evidence (the q = n borderline).
    """
    if q <= 0:
        raise ValueError(f"exponent must be positive, got {q}")
    if delta is None:
        delta = 4.0 * max(grid.spacing)
    pts = grid.points()
    image_norm = np.linalg.norm(F(pts), axis=1)
    zero_tol = 10.0 * float(np.min(image_norm))
    zeros = pts[image_norm <= max(zero_tol, 1e-14)]
    if zeros.shape[0]:
        diffs = pts[:, None, :] - zeros[None, :, :]
        dist = np.min(np.linalg.norm(diffs, axis=2), axis=1)
    else:
        dist = np.full(pts.shape[0], np.inf)

    # differencing only needs the singular core masked; the delta-ball is
    # excised from the integrand, so the excision radius is delta exactly
    core = image_norm <= max(zero_tol, 1e-14)
    w_vals = np.where(core, 0.0, np.log(np.where(core, 1.0, image_norm)))
    w_field = ScalarField(grid, w_vals, core if core.any() else None)
    grad_w = fd_gradient(w_field)
    grad_norm = np.linalg.norm(grad_w.values, axis=1)

    def value_at(dlt: float) -> tuple[float, float]:
        excised = dist <= dlt
        if grad_w.excised is not None:
            if np.any(grad_w.excised & ~excised):
                raise ValueError(
                    "delta too small: gradient stencil poisoned outside the excised ball"
                )
            excised = excised | grad_w.excised
        if bool(np.all(excised)):
            raise ValueError("excision swallows the whole grid")
        integrand = ScalarField(
            grid, np.where(excised, 0.0, grad_norm**q), excised if excised.any() else None
        )
        return integrate(integrand), excised_volume(integrand)

    v1, vol1 = value_at(delta)
    v2, vol2 = value_at(delta / 2)
    rel_change = abs(v2 - v1) / max(abs(v1), 1e-30)
    return EstimateReport(
        name="sobolev log norm",
        lhs=v1,
        rhs=v2,
        constant=v1 / v2 if v2 != 0 else 0.0,
        inputs={
            "mapping": F.spec_string(),
            "q": q,
            "delta": delta,
            "resolution": list(grid.resolution),
        },
        extras={
            "value_at_delta": v1,
            "value_at_half_delta": v2,
            "growth": v2 - v1,
            "relative_change": rel_change,
            "excised_volume": [vol1, vol2],
        },
    )
