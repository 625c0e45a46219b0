"""Catalog of explicit Sobolev test mappings and pointwise differential data.

Every mapping carries a vectorized evaluation rule and, where available, an
exact differential; per-point analysis produces DF, the Jacobian, the
adjugate, the operator norm, and the dilatation

    K(x) = |DF(x)|^n / J_F(x),

with the finite-dilatation convention at degenerate points: J = 0 together
with DF = 0 reads as K = 1 (flagged DEGENERATE), while J <= 0 with DF != 0
is flagged INFINITE.  |DF| is the spectral norm, which makes K >= 1 exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .tensorgrid import GridDomain, ScalarField, integrate, excised_volume

J_REL_TOL = 1e-12
DF_ZERO_REL_TOL = 1e-12


class DilatationFlag(enum.Enum):
    FINITE = "finite"
    DEGENERATE = "degenerate"  # J = 0 and DF = 0: K = 1 by convention
    INFINITE = "infinite"  # J <= 0 but DF != 0


@dataclass
class Mapping:
    """Named evaluable map F: R^n -> R^n with optional exact differential.

    `f` and `df` are vectorized over (N, n) point arrays; `df` returns
    (N, n, n).  `exceptional` marks points where the differential rule is
    undefined (e.g. the winding axis); evaluation may still be fine there.
    """

    name: str
    n: int
    params: dict
    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray] | None = None
    exceptional: Callable[[np.ndarray], np.ndarray] | None = None
    domain: tuple[tuple[float, float], ...] | None = None
    expected_dilatation: str = ""
    zero_set_description: str = ""

    def spec_string(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.name}:{inner}"

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.f(np.asarray(points, dtype=float))

    def exceptional_mask(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.exceptional is None:
            return np.zeros(pts.shape[0], dtype=bool)
        return self.exceptional(pts)

    def in_domain(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.domain is None:
            return np.ones(pts.shape[0], dtype=bool)
        ok = np.ones(pts.shape[0], dtype=bool)
        for ax, (lo, hi) in enumerate(self.domain):
            ok &= (pts[:, ax] >= lo) & (pts[:, ax] <= hi)
        return ok


@dataclass
class DifferentialSample:
    """Differential data of one mapping at one point."""

    point: np.ndarray
    df: np.ndarray
    jacobian: float
    opnorm: float
    adjugate: np.ndarray
    dilatation: float
    flag: DilatationFlag


@dataclass
class DifferentialSamples:
    """Batched differential data; arrays share leading dimension N."""

    points: np.ndarray  # (N, n)
    df: np.ndarray  # (N, n, n)
    jacobian: np.ndarray  # (N,)
    opnorm: np.ndarray  # (N,)
    adjugate: np.ndarray  # (N, n, n)
    dilatation: np.ndarray  # (N,), inf where flagged INFINITE
    flags: np.ndarray  # (N,) of DilatationFlag values
    exceptional: np.ndarray  # (N,) bool

    def __getitem__(self, i: int) -> DifferentialSample:
        return DifferentialSample(
            point=self.points[i],
            df=self.df[i],
            jacobian=float(self.jacobian[i]),
            opnorm=float(self.opnorm[i]),
            adjugate=self.adjugate[i],
            dilatation=float(self.dilatation[i]),
            flag=self.flags[i],
        )


# ---------------------------------------------------------------------------
# adjugate
# ---------------------------------------------------------------------------


def adjugate(m: np.ndarray) -> np.ndarray:
    """Adjugate of a square matrix: M @ adj(M) = det(M) * I.

    Built from cofactors (degree n-1 minors), so the identity holds to
    rounding even for singular M.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"adjugate needs a square matrix, got shape {m.shape}")
    return adjugate_batch(m[None])[0]


def adjugate_batch(ms: np.ndarray) -> np.ndarray:
    ms = np.asarray(ms, dtype=float)
    n = ms.shape[-1]
    if ms.shape[-2] != n:
        raise ValueError(f"adjugate needs square matrices, got shape {ms.shape}")
    if n == 2:
        a, b = ms[..., 0, 0], ms[..., 0, 1]
        c, d = ms[..., 1, 0], ms[..., 1, 1]
        out = np.empty_like(ms)
        out[..., 0, 0] = d
        out[..., 0, 1] = -b
        out[..., 1, 0] = -c
        out[..., 1, 1] = a
        return out
    # adj(M)_{ij} = cofactor_{ji} = (-1)^{i+j} * minor(M with row j, col i removed)
    out = np.empty_like(ms)
    idx = np.arange(n)
    for i in range(n):
        rows = idx[idx != i]
        for j in range(n):
            cols = idx[idx != j]
            minors = ms[..., rows[:, None], cols[None, :]]
            out[..., j, i] = (-1.0) ** (i + j) * np.linalg.det(minors)
    return out


# ---------------------------------------------------------------------------
# dilatation
# ---------------------------------------------------------------------------


def dilatation(df: np.ndarray, jac: float, scale: float = 1.0):
    """Dilatation K = |DF|^n / J with the finite-dilatation convention.

    Returns (K, flag).  Total over flags: never raises on degenerate input.
    """
    df = np.asarray(df, dtype=float)
    n = df.shape[0]
    opnorm = float(np.linalg.svd(df, compute_uv=False)[0]) if df.any() else 0.0
    k, f = _dilatation_values(
        np.array([jac], dtype=float), np.array([opnorm]), n, scale
    )
    return float(k[0]), f[0]


def _dilatation_values(jac: np.ndarray, opnorm: np.ndarray, n: int, scale: float = 1.0):
    j_tol = J_REL_TOL * (1.0 + opnorm**n) * max(scale, 1e-300)
    df_zero = opnorm <= DF_ZERO_REL_TOL * max(scale, 1e-300)
    positive = jac > j_tol
    k = np.ones_like(jac)
    flags = np.empty(jac.shape, dtype=object)
    flags[:] = DilatationFlag.FINITE
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        k = np.where(positive, opnorm**n / np.where(positive, jac, 1.0), k)
    degenerate = ~positive & df_zero
    infinite = ~positive & ~df_zero
    k[degenerate] = 1.0
    k[infinite] = np.inf
    flags[degenerate] = DilatationFlag.DEGENERATE
    flags[infinite] = DilatationFlag.INFINITE
    return k, flags


# ---------------------------------------------------------------------------
# differential sampling
# ---------------------------------------------------------------------------


def fd_jacobian(F: Mapping, points: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central-difference differential, O(h^2) at smooth points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = F.n
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        cols.append((F.f(pts + e) - F.f(pts - e)) / (2.0 * h))
    return np.stack(cols, axis=-1)


def differential_batch(F: Mapping, points: np.ndarray, fd_step: float = 1e-6) -> DifferentialSamples:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    exc = F.exceptional_mask(pts)
    if F.df is not None:
        dfs = F.df(pts)
    else:
        if np.any(exc):
            raise ValueError("finite differences requested at exceptional points")
        dfs = fd_jacobian(F, pts, fd_step)
    dfs = np.where(exc[:, None, None], 0.0, dfs)
    jac = np.linalg.det(dfs)
    svals = np.linalg.svd(dfs, compute_uv=False)
    opnorm = svals[..., 0]
    adj = adjugate_batch(dfs)
    scale = float(np.max(opnorm)) if opnorm.size else 1.0
    k, flags = _dilatation_values(jac, opnorm, F.n, scale=max(1.0, scale))
    return DifferentialSamples(
        points=pts,
        df=dfs,
        jacobian=jac,
        opnorm=opnorm,
        adjugate=adj,
        dilatation=k,
        flags=flags,
        exceptional=exc,
    )


def differential(F: Mapping, x: np.ndarray, fd_step: float = 1e-6) -> DifferentialSample:
    """Differential sample at one point; exact rule when available, else
    central differences (which refuse exceptional points)."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != F.n:
        raise ValueError(f"point has dimension {x.shape[0]}, mapping is {F.n}-d")
    if not F.in_domain(x[None])[0]:
        raise ValueError(f"point {x} outside declared domain of {F.name}")
    if F.exceptional_mask(x[None])[0]:
        raise ValueError(f"point {x} is on the exceptional set of {F.name}")
    return differential_batch(F, x[None], fd_step)[0]


# ---------------------------------------------------------------------------
# ellipticity form
# ---------------------------------------------------------------------------


@dataclass
class EllipticitySample:
    """The quasilinear form A(x, xi) = <theta xi, xi>^{(n-2)/2} theta xi
    induced by a differential sample, with its two-sided dilatation bounds."""

    point: np.ndarray
    theta: np.ndarray
    dilatation: float
    probes: np.ndarray  # (m, n)
    form_values: np.ndarray  # (m,) values of A(x, xi) . xi
    tightest_constant: float  # smallest c with 1/(cK) <= A.xi/|xi|^n <= c K^{n-1}
    bounds_hold: bool


def ellipticity_form(sample: DifferentialSample, probes: np.ndarray) -> EllipticitySample:
    if sample.flag is not DilatationFlag.FINITE:
        raise ValueError("ellipticity form requires J_F > 0 at the sample")
    df = sample.df
    n = df.shape[0]
    gram = df.T @ df
    theta = sample.jacobian ** (2.0 / n) * np.linalg.inv(gram)
    theta = 0.5 * (theta + theta.T)
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    quad = np.einsum("mi,ij,mj->m", probes, theta, probes)
    norms = np.linalg.norm(probes, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero probe direction")
    form_values = quad ** (n / 2.0)
    k = sample.dilatation
    ratio_hi = form_values / (k ** (n - 1) * norms**n)
    ratio_lo = norms**n / (k * form_values)
    c = max(1.0, float(np.max(ratio_hi)), float(np.max(ratio_lo)))
    return EllipticitySample(
        point=sample.point,
        theta=theta,
        dilatation=k,
        probes=probes,
        form_values=form_values,
        tightest_constant=c,
        bounds_hold=bool(np.all(form_values >= 0)),
    )


# ---------------------------------------------------------------------------
# energies and admissibility
# ---------------------------------------------------------------------------


@dataclass
class EnergyReport:
    total: float
    gradient_term: float  # integral of |DF|^alpha
    jacobian_term: float  # integral of J^{-beta}
    mask_volume: float
    infinite: bool


def polyconvex_energy(
    F: Mapping, grid: GridDomain, alpha: float, beta: float
) -> EnergyReport:
    """Quadrature of the polyconvex energy  |DF|^alpha + J^{-beta}  over the
    grid box.  Exceptional points of F are excised and their quadrature
    volume reported; J = 0 on an unmasked point flags the energy INFINITE.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    pts = grid.points()
    exc = F.exceptional_mask(pts)
    samples = differential_batch(F, pts)
    unmasked_degenerate = ~exc & (samples.flags != DilatationFlag.FINITE)
    infinite = bool(np.any(unmasked_degenerate))
    grad_term = ScalarField(grid, np.where(exc, 0.0, samples.opnorm**alpha), exc)
    with np.errstate(divide="ignore", over="ignore"):
        jt = np.where(
            exc | (samples.jacobian <= 0), 0.0, samples.jacobian ** (-beta)
        )
    jac_term = ScalarField(grid, jt, exc)
    g = integrate(grad_term)
    j = integrate(jac_term)
    total = math.inf if infinite else g + j
    return EnergyReport(
        total=total,
        gradient_term=g,
        jacobian_term=math.inf if infinite else j,
        mask_volume=excised_volume(grad_term),
        infinite=infinite,
    )


def young_admissible(n, alpha, beta, p) -> bool:
    """Exponent condition  n/alpha + 1/beta < 1/p  under which a finite
    polyconvex energy forces K into L^p locally."""
    if min(alpha, beta, p) <= 0 or n < 2:
        raise ValueError("arguments must be positive (n >= 2)")
    from fractions import Fraction

    if all(isinstance(v, (int, Fraction)) for v in (n, alpha, beta, p)):
        return Fraction(n, 1) / alpha + Fraction(1, 1) / beta < Fraction(1, 1) / p
    return n / alpha + 1.0 / beta < 1.0 / p


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def _radii(pts: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(pts * pts, axis=-1))


def _identity(n: int, scale: float) -> Mapping:
    s = scale

    def f(pts):
        return s * pts

    def df(pts):
        return np.broadcast_to(s * np.eye(n), (pts.shape[0], n, n)).copy()

    return Mapping(
        "identity", n, {} if s == 1.0 else {"scale": s}, f, df,
        expected_dilatation="K = 1 everywhere",
        zero_set_description="single point at the origin",
    )


def _linear(n: int, matrix: np.ndarray, params: dict) -> Mapping:
    a = np.asarray(matrix, dtype=float)
    if a.shape != (n, n):
        raise ValueError(f"linear mapping needs an {n}x{n} matrix, got {a.shape}")

    def f(pts):
        return pts @ a.T

    def df(pts):
        return np.broadcast_to(a, (pts.shape[0], n, n)).copy()

    return Mapping(
        "linear", n, params, f, df,
        expected_dilatation="constant K from the singular values of A",
        zero_set_description="origin (A nonsingular) or a subspace",
    )


def _radial_power(n: int, beta: float, scale: float) -> Mapping:
    if beta <= 0:
        raise ValueError(f"radial_power needs beta > 0, got {beta}")
    s = scale

    def f(pts):
        r = _radii(pts)
        fac = np.where(r > 0, r ** (beta - 1.0), 0.0 if beta > 1 else 1.0)
        return s * fac[:, None] * pts

    def df(pts):
        r = _radii(pts)
        safe = np.where(r > 0, r, 1.0)
        unit = pts / safe[:, None]
        eye = np.eye(n)
        fac = np.where(r > 0, r ** (beta - 1.0), 0.0)
        out = fac[:, None, None] * (
            eye[None] + (beta - 1.0) * unit[:, :, None] * unit[:, None, :]
        )
        return s * out

    exceptional = None
    if beta < 1:
        exceptional = lambda pts: _radii(pts) == 0.0
    params = {"beta": beta}
    if s != 1.0:
        params["scale"] = s
    return Mapping(
        "radial_power", n, params, f, df, exceptional,
        expected_dilatation="K = max(beta,1)^n / beta, constant off the origin",
        zero_set_description="single point at the origin",
    )


def _winding(n: int, k: int, scale: float) -> Mapping:
    if k < 1 or int(k) != k:
        raise ValueError(f"winding needs integer k >= 1, got {k}")
    k = int(k)
    s = scale

    def f(pts):
        out = s * pts.copy()
        x, y = pts[:, 0], pts[:, 1]
        rho = np.hypot(x, y)
        phi = k * np.arctan2(y, x)
        out[:, 0] = s * rho * np.cos(phi)
        out[:, 1] = s * rho * np.sin(phi)
        return out

    def df(pts):
        x, y = pts[:, 0], pts[:, 1]
        rho = np.hypot(x, y)
        safe = np.where(rho > 0, rho, 1.0)
        ct, st = x / safe, y / safe
        theta = np.arctan2(y, x)
        cp, sp = np.cos(k * theta), np.sin(k * theta)
        out = np.zeros((pts.shape[0], n, n))
        # planar block: u1 e_r^T + k u2 e_theta^T, orthonormal frames
        out[:, 0, 0] = cp * ct + k * sp * st
        out[:, 0, 1] = cp * st - k * sp * ct
        out[:, 1, 0] = sp * ct - k * cp * st
        out[:, 1, 1] = sp * st + k * cp * ct
        for ax in range(2, n):
            out[:, ax, ax] = 1.0
        return s * out

    def exceptional(pts):
        return np.hypot(pts[:, 0], pts[:, 1]) == 0.0

    params = {"k": k}
    if s != 1.0:
        params["scale"] = s
    return Mapping(
        "winding", n, params, f, df, exceptional,
        expected_dilatation=f"K = k^(n-1) = {k ** (n - 1)} off the axis",
        zero_set_description="the cylindrical axis x1 = x2 = 0",
    )


def _cavitation(n: int, c: float, scale: float) -> Mapping:
    if c <= 0:
        raise ValueError(f"cavitation needs c > 0, got {c}")
    s = scale

    def f(pts):
        r = _radii(pts)
        safe = np.where(r > 0, r, 1.0)
        return s * ((r + c) / safe)[:, None] * pts

    def df(pts):
        r = _radii(pts)
        safe = np.where(r > 0, r, 1.0)
        unit = pts / safe[:, None]
        eye = np.eye(n)
        fac = 1.0 + c / safe
        out = fac[:, None, None] * eye[None] - (c / safe)[:, None, None] * (
            unit[:, :, None] * unit[:, None, :]
        )
        return s * out

    params = {"c": c}
    if s != 1.0:
        params["scale"] = s
    return Mapping(
        "cavitation", n, params, f, df, lambda pts: _radii(pts) == 0.0,
        expected_dilatation="K = 1 + c/r, unbounded near the origin",
        zero_set_description="empty (|F| >= c)",
    )


def _squeeze(n: int, w: float, scale: float) -> Mapping:
    if w <= 0:
        raise ValueError(f"squeeze needs flat width w > 0, got {w}")
    half = w / 2.0
    s = scale

    def g(t):
        return np.where(
            t > half, (t - half) ** 2, np.where(t < -half, -((t + half) ** 2), 0.0)
        )

    def gprime(t):
        return np.where(t > half, 2.0 * (t - half), np.where(t < -half, -2.0 * (t + half), 0.0))

    def f(pts):
        out = s * pts.copy()
        out[:, 0] = s * g(pts[:, 0])
        return out

    def df(pts):
        out = np.zeros((pts.shape[0], n, n))
        out[:, 0, 0] = gprime(pts[:, 0])
        for ax in range(1, n):
            out[:, ax, ax] = 1.0
        return s * out

    params = {"w": w}
    if s != 1.0:
        params["scale"] = s
    return Mapping(
        "squeeze", n, params, f, df,
        expected_dilatation="INFINITE on the flat slab |x1| <= w/2 (J = 0, DF != 0)",
        zero_set_description="preimages of points over the flat interval are segments",
    )


_ALIASES = {"radial": "radial_power", "id": "identity"}


def example_mapping(name: str, n: int = 2, **params) -> Mapping:
    """Catalog constructor.  Known names: identity, linear, radial_power
    (alias radial), winding, cavitation, squeeze.  All accept `scale`."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    name = _ALIASES.get(name, name)
    scale = float(params.pop("scale", 1.0))
    if scale <= 0:
        raise ValueError("scale must be positive")
    if name == "identity":
        _reject_extras(name, params)
        return _identity(n, scale)
    if name == "linear":
        if "matrix" in params:
            matrix = np.asarray(params.pop("matrix"), dtype=float)
            _reject_extras(name, params)
            shown = {}
        else:
            diag = [float(params.pop(f"d{i+1}", 1.0)) for i in range(n)]
            _reject_extras(name, params)
            matrix = np.diag(diag)
            shown = {f"d{i+1}": d for i, d in enumerate(diag)}
        if scale != 1.0:
            matrix = scale * matrix
            shown["scale"] = scale
        return _linear(n, matrix, shown)
    if name == "radial_power":
        beta = float(params.pop("beta"))
        _reject_extras(name, params)
        return _radial_power(n, beta, scale)
    if name == "winding":
        k = params.pop("k")
        _reject_extras(name, params)
        return _winding(n, k, scale)
    if name == "cavitation":
        c = float(params.pop("c"))
        _reject_extras(name, params)
        return _cavitation(n, c, scale)
    if name == "squeeze":
        w = float(params.pop("w"))
        _reject_extras(name, params)
        return _squeeze(n, w, scale)
    raise ValueError(f"unknown mapping name: {name!r}")


def _reject_extras(name, params):
    if params:
        raise ValueError(f"unknown parameters for {name}: {sorted(params)}")


def parse_mapping_spec(spec: str, n: int = 2) -> Mapping:
    """Parse the mini-language "name:key=value,..." used by the CLI."""
    name, _, rest = spec.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise ValueError(f"malformed parameter {item!r} in {spec!r}")
            try:
                num = float(val)
            except ValueError as err:
                raise ValueError(f"non-numeric value in {item!r}") from err
            params[key.strip()] = int(num) if num == int(num) and "." not in val else num
    return example_mapping(name.strip(), n=n, **params)
