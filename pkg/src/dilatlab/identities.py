"""Quadrature verification of the weak divergence identity and estimates.

The central identity couples a mapping F and a C^1 vector field V:

    div( adj(DF) (V o F) ) = [(div V) o F] J_F    (distributionally),

with the divergence-free special case reducing the right side to zero.
It is tested against a C^2 cutoff eta by one integration by parts:

    LHS = - int < adj(DF) V(F), grad eta > dx,
    RHS =   int (div V)(F) J_F eta dx,

so no second derivatives of F are ever discretized.  On top of it sit the
Caccioppoli-type energy estimate with weight 1/K on the left and K^{n-1}
on the right, the log-log energy with excised zero set, and the exponent
arithmetic pairing integrability of K with a dimension bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .bump import OUTER_RADIUS, BumpProfile, radial_n_laplacian
from .mappings import DilatationFlag, Mapping, differential_batch
from .tensorgrid import (
    Cutoff,
    GridDomain,
    ScalarField,
    excised_volume,
    fd_gradient,
    integrate,
    make_grid,
)

RESIDUAL_FLOOR = 1e-30


@dataclass
class IdentityReport:
    """LHS/RHS/residual record for one weak-form check at one resolution."""

    name: str
    resolution: tuple
    spacing: tuple
    lhs: float
    rhs: float
    mask_volume: float = 0.0
    slope: float | None = None  # filled by refinement sweeps

    @property
    def abs_residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def rel_residual(self) -> float:
        return self.abs_residual / max(abs(self.lhs), abs(self.rhs), RESIDUAL_FLOOR)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "resolution": list(self.resolution),
            "spacing": list(self.spacing),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "mask_volume": self.mask_volume,
            "slope": self.slope,
        }


@dataclass
class EstimateReport:
    """Two-sided estimate record; the constant is observed, never assumed."""

    name: str
    lhs: float
    rhs: float
    constant: float
    inputs: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "constant": self.constant,
            "inputs": self.inputs,
            "extras": self.extras,
        }


# ---------------------------------------------------------------------------
# vector fields
# ---------------------------------------------------------------------------


@dataclass
class FlowField:
    """C^1 vector field with analytic divergence (vectorized over (N, n))."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    divergence: Callable[[np.ndarray], np.ndarray]
    divergence_free: bool = False

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        return self.fn(np.asarray(pts, dtype=float))


def constant_field(n: int, axis: int = 0) -> FlowField:
    e = np.zeros(n)
    e[axis] = 1.0
    return FlowField(
        name=f"constant e{axis + 1}",
        fn=lambda pts: np.broadcast_to(e, pts.shape).copy(),
        divergence=lambda pts: np.zeros(pts.shape[0]),
        divergence_free=True,
    )


def linear_field(n: int) -> FlowField:
    return FlowField(
        name="linear y",
        fn=lambda pts: pts.copy(),
        divergence=lambda pts: np.full(pts.shape[0], float(n)),
    )


def bump_vector_field(profile: BumpProfile, n: int | None = None) -> FlowField:
    """The gradient power field V = |grad Phi|^{n-2} grad Phi of a profile.

    div V at radius r is the radial n-Laplacian of the profile; at the
    origin the limit is n * u''(0) for n = 2 and 0 for n >= 3.  Requires a
    C^1 field, i.e. a profile whose junction data actually match.
    """
    n = profile.n if n is None else n
    a = profile.a
    # junction C^1 screen for the radial component W = |u'|^{n-2} u'
    for r0 in (a / 2, a):
        eps = 1e-9 * a
        left = np.array([r0 - eps]), np.array([r0 + eps])
        w_jump = abs(float(profile.slope(left[1]) - profile.slope(left[0])))
        wp_jump = abs(float(profile.curvature(left[1]) - profile.curvature(left[0])))
        if w_jump > 1e-6 / a or wp_jump > 1e-4 / a**2:
            raise ValueError(
                "profile junction data do not match; the gradient power "
                "field would not be C^1"
            )

    c2f = profile.coefficient_floats[1]

    def fn(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        r = np.linalg.norm(pts, axis=1)
        safe = np.where(r > 0, r, 1.0)
        d1 = profile.slope(safe)
        w = d1 if n == 2 else np.abs(d1) ** (n - 2) * d1
        w = np.where(r > 0, w, 0.0)
        return (w / safe)[:, None] * pts

    def div(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        r = np.linalg.norm(pts, axis=1)
        out = np.empty_like(r)
        pos = r > 0
        if np.any(pos):
            out[pos] = radial_n_laplacian(profile, n, r[pos])
        origin_limit = 2.0 * n * c2f / a**2 if n == 2 else 0.0
        out[~pos] = origin_limit
        return out

    return FlowField(name=f"bump gradient power (a={a:g})", fn=fn, divergence=div)


# ---------------------------------------------------------------------------
# weak identity
# ---------------------------------------------------------------------------


def weak_identity_residual(
    F: Mapping,
    V: FlowField,
    eta: Cutoff,
    grid: GridDomain,
    name: str | None = None,
) -> IdentityReport:
    """One-resolution check of the adjugate divergence identity."""
    if not eta.support_inside(grid.box):
        raise ValueError("cutoff support exceeds the grid box")
    pts = grid.points()
    exc = F.exceptional_mask(pts)
    samples = differential_batch(F, pts)
    image = F(pts)
    flux = np.einsum("nij,nj->ni", samples.adjugate, V(image))
    lhs_vals = -np.einsum("ni,ni->n", flux, eta.gradient(pts))
    mask = exc if np.any(exc) else None
    lhs_field = ScalarField(grid, np.where(exc, 0.0, lhs_vals), mask)
    lhs = integrate(lhs_field)
    if V.divergence_free:
        rhs = 0.0
    else:
        rhs_vals = V.divergence(image) * samples.jacobian * eta.value(pts)
        rhs = integrate(ScalarField(grid, np.where(exc, 0.0, rhs_vals), mask))
    return IdentityReport(
        name=name or f"weak identity: {F.spec_string()} / {V.name}",
        resolution=grid.resolution,
        spacing=grid.spacing,
        lhs=lhs,
        rhs=rhs,
        mask_volume=excised_volume(lhs_field),
    )


@dataclass
class IdentitySweep:
    reports: list
    pairwise_slopes: list
    fitted_slope: float

    def to_dict(self) -> dict:
        return {
            "reports": [r.to_dict() for r in self.reports],
            "pairwise_slopes": self.pairwise_slopes,
            "fitted_slope": self.fitted_slope,
        }


def weak_identity_sweep(
    F: Mapping,
    V: FlowField,
    eta: Cutoff,
    box,
    resolutions,
    name: str | None = None,
) -> IdentitySweep:
    """Refinement study of the weak identity over dyadic resolutions."""
    reports = []
    for res in resolutions:
        grid = make_grid(F.n, box, res)
        reports.append(weak_identity_residual(F, V, eta, grid, name))
    rel = np.array([max(r.rel_residual, RESIDUAL_FLOOR) for r in reports])
    hs = np.array([max(r.spacing) for r in reports])
    pairwise = list(
        np.log(rel[:-1] / rel[1:]) / np.log(hs[:-1] / hs[1:])
    )
    fitted = float(np.polyfit(np.log(hs), np.log(rel), 1)[0])
    for r in reports:
        r.slope = fitted
    return IdentitySweep(reports, [float(s) for s in pairwise], fitted)


# ---------------------------------------------------------------------------
# Caccioppoli-type estimate
# ---------------------------------------------------------------------------


def caccioppoli_sides(
    w_field: ScalarField,
    k_values: np.ndarray,
    k_flags: np.ndarray,
    eta: Cutoff,
    grid: GridDomain,
    n: int,
) -> tuple[float, float, dict]:
    """Quadrature core of the energy estimate, reusable with any K field.

    LHS = int |grad w|^n eta^n / K,  RHS = int |grad eta|^n K^{n-1}.
    INFINITE-K points get weight 0 on the left (the 1/K limit); callers
    must screen them out of positive measure before trusting the right side.
    """
    pts = grid.points()
    grad_w = fd_gradient(w_field)
    grad_norm = np.linalg.norm(grad_w.values, axis=1)
    eta_vals = eta.value(pts)
    inv_k = np.where(k_flags == DilatationFlag.INFINITE, 0.0, 1.0 / k_values)
    lhs_vals = grad_norm**n * eta_vals**n * inv_k
    lhs_field = ScalarField(grid, lhs_vals, grad_w.excised)
    lhs = integrate(lhs_field)
    grad_eta_norm = np.linalg.norm(eta.gradient(pts), axis=1)
    finite_k = np.where(k_flags == DilatationFlag.INFINITE, 0.0, k_values)
    rhs_vals = grad_eta_norm**n * finite_k ** (n - 1)
    rhs = integrate(ScalarField(grid, rhs_vals, w_field.excised))
    extras = {
        "lhs_mask_volume": excised_volume(lhs_field),
        "k_max_finite": float(np.max(finite_k)) if finite_k.size else 0.0,
    }
    return lhs, rhs, extras


def caccioppoli_check(
    F: Mapping,
    profile: BumpProfile,
    eta: Cutoff,
    grid: GridDomain,
    dilatation_map: Mapping | None = None,
    max_infinite_fraction: float = 0.01,
) -> EstimateReport:
    """Both sides of the Caccioppoli-type estimate for w = log(Phi o F).

    `dilatation_map` substitutes another catalog mapping's dilatation field
    while keeping the w geometry of F (used by the constant-K scaling
    diagnostic); by default K comes from F itself.
    """
    n = F.n
    pts = grid.points()
    image = F(pts)
    r_img = np.linalg.norm(image, axis=1)
    eta_vals = eta.value(pts)
    support = eta_vals > 0
    if np.any(r_img[support] >= OUTER_RADIUS):
        raise ValueError(
            "mapping image escapes the profile domain ball on the cutoff support"
        )
    inside = r_img < OUTER_RADIUS
    w_vals = np.zeros(len(pts))
    w_vals[inside] = np.log(profile.value(r_img[inside]))
    mask = None if bool(np.all(inside)) else ~inside
    w_field = ScalarField(grid, w_vals, mask)

    k_source = dilatation_map if dilatation_map is not None else F
    samples = differential_batch(k_source, pts)
    infinite = samples.flags == DilatationFlag.INFINITE
    frac = float(np.mean(infinite[support])) if np.any(support) else 0.0
    if frac > max_infinite_fraction:
        raise ValueError(
            f"dilatation INFINITE on fraction {frac:.3f} of the cutoff support"
        )

    lhs, rhs, extras = caccioppoli_sides(
        w_field, samples.dilatation, samples.flags, eta, grid, n
    )
    phi_pow = np.zeros(len(pts))
    phi_pow[inside] = profile.value(r_img[inside]) ** (1 - n)
    test_fn = eta_vals**n * phi_pow
    extras.update(
        {
            "test_function_range": [float(np.min(test_fn)), float(np.max(test_fn))],
            "infinite_k_fraction_on_support": frac,
        }
    )
    constant = lhs / rhs if rhs > 0 else 0.0
    return EstimateReport(
        name="caccioppoli",
        lhs=lhs,
        rhs=rhs,
        constant=constant,
        inputs={
            "mapping": F.spec_string(),
            "dilatation_from": k_source.spec_string(),
            "a": profile.a,
            "cutoff": {"center": list(eta.center), "r0": eta.r0, "r1": eta.r1},
            "resolution": list(grid.resolution),
        },
        extras=extras,
    )


# ---------------------------------------------------------------------------
# log-log energy with excised zero set
# ---------------------------------------------------------------------------


def _distance_to_zero_set(F: Mapping, pts: np.ndarray, image_norm: np.ndarray):
    """Distance from each grid point to the sampled zero set of F."""
    zero_tol = 10.0 * float(np.min(image_norm))
    zeros = pts[image_norm <= max(zero_tol, 1e-14)]
    if zeros.shape[0] == 0:
        return np.full(pts.shape[0], np.inf)
    diffs = pts[:, None, :] - zeros[None, :, :]
    return np.min(np.linalg.norm(diffs, axis=2), axis=1)


def log_log_energy(
    F: Mapping,
    eta: Cutoff,
    grid: GridDomain,
    eps: float,
    delta: float | None = None,
    profile: BumpProfile | None = None,
) -> EstimateReport:
    """Quadrature of |grad log log(1/|F|)|^{n-1+eps} eta^{n-1+eps} with the
    zero set of F excised at radius delta, reported at delta and delta/2.

    With a profile given, w = log(Phi_a o F) is used instead (the two
    readings agree wherever |F| > a).
    """
    if not (0 <= eps < 1):
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    n = F.n
    q = n - 1 + eps
    if delta is None:
        delta = 4.0 * max(grid.spacing)
    pts = grid.points()
    image = F(pts)
    r_img = np.linalg.norm(image, axis=1)
    eta_vals = eta.value(pts)
    support = eta_vals > 0
    if np.any(r_img[support] >= OUTER_RADIUS):
        raise ValueError("mapping image escapes the domain ball on the support")
    dist = _distance_to_zero_set(F, pts, r_img)

    # mask only where w is undefined; the delta-ball comes off the integrand
    zero_tol = 10.0 * float(np.min(r_img))
    core = (r_img <= max(zero_tol, 1e-14)) | (r_img >= OUTER_RADIUS)
    w_vals = np.zeros(len(pts))
    keep = ~core
    if profile is None:
        w_vals[keep] = np.log(np.log(1.0 / r_img[keep]))
    else:
        w_vals[keep] = np.log(profile.value(r_img[keep]))
    w_field = ScalarField(grid, w_vals, core if core.any() else None)
    grad_w = fd_gradient(w_field)
    grad_norm = np.linalg.norm(grad_w.values, axis=1)

    def value_at(dlt: float) -> tuple[float, float]:
        excised = dist <= dlt
        if grad_w.excised is not None:
            if np.any(grad_w.excised & ~excised & (eta_vals > 0)):
                raise ValueError(
                    "delta too small: gradient stencil poisoned on the support"
                )
            excised = excised | grad_w.excised
        if bool(np.all(excised)):
            raise ValueError("excision swallows the whole grid")
        integrand = ScalarField(
            grid,
            np.where(excised, 0.0, grad_norm**q * eta_vals**q),
            excised if excised.any() else None,
        )
        return integrate(integrand), excised_volume(integrand)

    v1, vol1 = value_at(delta)
    v2, vol2 = value_at(delta / 2)
    return EstimateReport(
        name="log-log energy",
        lhs=v1,
        rhs=v2,
        constant=v1 / v2 if v2 > 0 else 0.0,
        inputs={
            "mapping": F.spec_string(),
            "eps": eps,
            "exponent": q,
            "delta": delta,
            "variant": "log(1/|F|) composed" if profile is None else "profile composed",
            "resolution": list(grid.resolution),
        },
        extras={
            "value_at_delta": v1,
            "value_at_half_delta": v2,
            "growth": v2 - v1,
            "excised_volume": [vol1, vol2],
        },
    )


# ---------------------------------------------------------------------------
# exponent arithmetic
# ---------------------------------------------------------------------------


def admissible_epsilon(n, p):
    """Largest eps with (n-1+eps)/(1-eps) <= p:  eps = (p-n+1)/(p+1).

    Exact over rational inputs (ints and Fractions stay Fractions).
    """
    if p < n - 1:
        raise ValueError(f"need p >= n - 1, got p={p}, n={n}")
    if isinstance(p, (int, Fraction)) and isinstance(n, (int, Fraction)):
        return Fraction(p - n + 1, 1) / Fraction(p + 1, 1)
    return (p - n + 1) / (p + 1)


def hausdorff_bound(n, eps):
    """Dimension bound n - (n - 1 + eps) = 1 - eps for the zero set."""
    if not (0 <= eps < 1):
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    return 1 - eps
