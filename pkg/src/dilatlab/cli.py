"""Command-line verification suites.

Subcommands map one-to-one onto the package's check families:

    construct-bump      head-value search, exact + decimal coefficients
    verify-bump         the eight-property suite for one profile
    nlaplacian-profile  CSV of (r, value, slope, n-Laplacian)
    check-identity      weak divergence identity refinement sweep
    caccioppoli         both sides of the energy estimate
    loglog-energy       excised log-log energy with delta trend
    analyze-map         differential/dilatation/energy/zero-set summary
    exponents           admissible epsilon and dimension-bound table

Exit codes: 0 all checks pass, 1 computed with failures, 2 invalid input.
Every run emits a ReportEnvelope; its payload (everything except the
wall-clock duration) serializes deterministically, and the envelope carries
a sha256 digest of that payload so byte-level reproducibility is checkable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .bump import (
    OUTER_RADIUS,
    CertificationError,
    construct_bump,
    export_profile_csv,
    radial_n_laplacian,
    verify_properties,
)
from .identities import (
    admissible_epsilon,
    bump_vector_field,
    caccioppoli_check,
    constant_field,
    hausdorff_bound,
    linear_field,
    weak_identity_sweep,
)
from .mappings import (
    DilatationFlag,
    differential_batch,
    parse_mapping_spec,
    polyconvex_energy,
)
from .singular import box_counting_dimension, zero_set
from .tensorgrid import ScalarField, integrate, make_grid, smooth_cutoff

SCOPE_NOTE = (
    "Discreteness and openness of the mapping are not verifiable by finite "
    "sampling; this tool substitutes the certified-profile, weak-identity, "
    "estimate and dimension diagnostics, plus the squeeze-family contrast "
    "whose flat preimage segment (dimension ~1) shows how the conclusion "
    "fails when the dilatation loses integrability."
)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    return repr(obj)


@dataclass
class ReportEnvelope:
    """Envelope around one CLI run; `overall_pass` is the conjunction of the
    member pass flags and the payload serializes deterministically."""

    command: list
    reports: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    version: str = __version__
    duration_seconds: float = 0.0

    def add(self, kind: str, passed: bool, body: dict) -> None:
        self.reports.append({"kind": kind, "pass": bool(passed), "body": _jsonable(body)})

    @property
    def overall_pass(self) -> bool:
        return all(r["pass"] for r in self.reports)

    def payload(self) -> dict:
        return {
            "version": self.version,
            "command": list(self.command),
            "reports": self.reports,
            "notes": list(self.notes),
            "overall_pass": self.overall_pass,
        }

    def canonical_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, separators=(",", ":"))

    def payload_digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def to_json(self) -> str:
        out = self.payload()
        out["duration_seconds"] = self.duration_seconds
        out["payload_sha256"] = self.payload_digest()
        return json.dumps(out, sort_keys=True, indent=2)


def _write_envelope(env: ReportEnvelope, out_path: str | None) -> None:
    if out_path is None:
        out_dir = os.environ.get("DILATLAB_OUT_DIR")
        if out_dir is None:
            return
        os.makedirs(out_dir, exist_ok=True)
        out_path = os.path.join(out_dir, "envelope.json")
    with open(out_path, "w") as fh:
        fh.write(env.to_json())
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_construct_bump(args, env: ReportEnvelope) -> None:
    profile = construct_bump(args.n, args.a, c0_floor=args.c0_floor)
    coeffs = profile.coefficients_json()
    cert = profile.certificates["inner"]
    for name, entry in coeffs.items():
        exact = entry["rational"]
        if entry["log2_coeff"] != "0":
            exact += f" + ({entry['log2_coeff']})*log2"
        if entry.get("log_inv_a_coeff", "0") != "0":
            exact += f" + ({entry['log_inv_a_coeff']})*log(1/a)"
        print(f"{name} = {exact} = {entry['decimal']:.10f}")
    print(
        f"certificate: max g = {cert.max_value:g} at u = {cert.max_location:g} "
        f"({cert.method}) -> {'PASS' if cert.passed else 'FAIL'}"
    )
    env.add(
        "bump-construction",
        cert.passed,
        {
            "a": args.a,
            "n": args.n,
            "coefficients": coeffs,
            "certificates": {k: c.to_dict() for k, c in profile.certificates.items()},
            "search": profile.search_info,
        },
    )


def _cmd_verify_bump(args, env: ReportEnvelope) -> None:
    profile = construct_bump(args.n, args.a)
    report = verify_properties(profile, samples=args.samples)
    for check in report.checks:
        print(f"({check.key}) {check.description}: {'PASS' if check.passed else 'FAIL'}")
    env.add("bump-properties", report.all_passed, report.to_dict())
    env.notes.extend(report.notes)


def _cmd_nlaplacian_profile(args, env: ReportEnvelope) -> None:
    profile = construct_bump(args.n, args.a)
    export_profile_csv(profile, args.csv, num=args.samples)
    r = np.linspace(args.a * 1e-4, OUTER_RADIUS * (1 - 1e-9), args.samples)
    lap = radial_n_laplacian(profile, args.n, r)
    d1, d2 = profile.slope(r), profile.curvature(r)
    scale = (args.n - 1) * (
        np.abs(d1) ** (args.n - 2) if args.n > 2 else 1.0
    ) * (np.abs(d2) + np.abs(d1) / r)
    worst = float(np.max(lap / np.maximum(scale, 1e-300)))
    print(f"wrote {args.samples} samples to {args.csv}; max relative n-Laplacian {worst:.3e}")
    env.add(
        "nlaplacian-profile",
        worst <= 1e-12,
        {"csv": args.csv, "samples": args.samples, "max_relative_laplacian": worst},
    )


def _parse_box(spec: str, n: int):
    lo, _, hi = spec.partition(",")
    return [(float(lo), float(hi))] * n


def _cmd_check_identity(args, env: ReportEnvelope) -> None:
    F = parse_mapping_spec(args.map, n=args.n)
    box = _parse_box(args.box, args.n)
    eta = smooth_cutoff([0.0] * args.n, args.r0, args.r1)
    if args.field == "linear":
        V = linear_field(args.n)
    elif args.field == "constant":
        V = constant_field(args.n)
    else:
        V = bump_vector_field(construct_bump(args.n, args.a))
    resolutions = [int(r) for r in args.resolutions.split(",")]
    sweep = weak_identity_sweep(F, V, eta, box, resolutions)
    for rep in sweep.reports:
        print(
            f"res {rep.resolution[0]:4d}: lhs={rep.lhs:+.8e} rhs={rep.rhs:+.8e} "
            f"rel_residual={rep.rel_residual:.3e}"
        )
    if V.divergence_free:
        final = sweep.reports[-1]
        passed = abs(final.lhs) <= args.divfree_tol and final.rhs == 0.0
        print(f"divergence-free: RHS = 0 exactly, |LHS| = {abs(final.lhs):.3e}")
    else:
        passed = sweep.fitted_slope >= args.min_slope
        print(f"fitted refinement slope {sweep.fitted_slope:.2f} (pairwise "
              f"{', '.join(f'{s:.2f}' for s in sweep.pairwise_slopes)})")
    env.add("weak-identity-sweep", passed, {
        "mapping": F.spec_string(), "field": V.name, **sweep.to_dict(),
    })


def _cmd_caccioppoli(args, env: ReportEnvelope) -> None:
    F = parse_mapping_spec(args.map, n=args.n)
    profile = construct_bump(args.n, args.a)
    box = _parse_box(args.box, args.n)
    grid = make_grid(args.n, box, args.resolution)
    eta = smooth_cutoff([0.0] * args.n, args.r0, args.r1)
    report = caccioppoli_check(F, profile, eta, grid)
    print(
        f"lhs={report.lhs:.6e}  rhs={report.rhs:.6e}  "
        f"empirical constant={report.constant:.6e}"
    )
    passed = math.isfinite(report.lhs) and math.isfinite(report.rhs) and report.rhs >= 0
    env.add("caccioppoli", passed, report.to_dict())


def _cmd_loglog_energy(args, env: ReportEnvelope) -> None:
    from .identities import log_log_energy

    F = parse_mapping_spec(args.map, n=args.n)
    box = _parse_box(args.box, args.n)
    grid = make_grid(args.n, box, args.resolution)
    eta = smooth_cutoff([0.0] * args.n, args.r0, args.r1)
    report = log_log_energy(F, eta, grid, args.eps, delta=args.delta)
    print(
        f"value(delta)={report.lhs:.6e}  value(delta/2)={report.rhs:.6e}  "
        f"growth={report.extras['growth']:.3e}"
    )
    passed = math.isfinite(report.lhs) and math.isfinite(report.rhs)
    env.add("loglog-energy", passed, report.to_dict())


def _cmd_analyze_map(args, env: ReportEnvelope) -> None:
    F = parse_mapping_spec(args.map, n=args.n)
    box = _parse_box(args.box, args.n)
    grid = make_grid(args.n, box, args.resolution)
    pts = grid.points()
    samples = differential_batch(F, pts)
    finite = samples.flags == DilatationFlag.FINITE
    n_inf = int(np.sum(samples.flags == DilatationFlag.INFINITE))
    n_deg = int(np.sum(samples.flags == DilatationFlag.DEGENERATE))
    k_fin = samples.dilatation[finite]
    adj_resid = np.linalg.norm(
        np.einsum("nij,njk->nik", samples.df, samples.adjugate)
        - samples.jacobian[:, None, None] * np.eye(F.n)[None],
        axis=(1, 2),
    )
    adj_scale = 1.0 + samples.opnorm**F.n
    adj_ok = bool(np.all(adj_resid <= 1e-10 * adj_scale))
    k_floor_ok = bool(np.all(k_fin >= 1 - 1e-10)) if k_fin.size else True
    print(f"mapping {F.spec_string()} on {grid.resolution} grid:")
    if k_fin.size:
        print(f"  K finite on {int(np.sum(finite))} pts: min={np.min(k_fin):.6g} "
              f"max={np.max(k_fin):.6g}")
    print(f"  flags: INFINITE={n_inf} DEGENERATE={n_deg}")
    print(f"  adjugate identity residual ok: {adj_ok}; K >= 1 floor ok: {k_floor_ok}")
    body = {
        "mapping": F.spec_string(),
        "expected_dilatation": F.expected_dilatation,
        "k_min": float(np.min(k_fin)) if k_fin.size else None,
        "k_max": float(np.max(k_fin)) if k_fin.size else None,
        "infinite_points": n_inf,
        "degenerate_points": n_deg,
        "adjugate_identity_ok": adj_ok,
        "dilatation_floor_ok": k_floor_ok,
    }
    if args.p is not None:
        kp = np.where(finite, samples.dilatation, 0.0) ** args.p
        body["k_lp_quadrature"] = integrate(
            ScalarField(grid, np.where(finite, kp, 0.0), ~finite if n_inf + n_deg else None)
        )
        body["k_lp_exponent"] = args.p
    if args.alpha is not None and args.beta is not None:
        energy = polyconvex_energy(F, grid, args.alpha, args.beta)
        body["polyconvex_energy"] = {
            "total": energy.total,
            "gradient_term": energy.gradient_term,
            "jacobian_term": energy.jacobian_term,
            "infinite": energy.infinite,
        }
        print(f"  polyconvex energy (alpha={args.alpha}, beta={args.beta}): {energy.total:.6g}")
    h = max(grid.spacing)
    cloud = zero_set(F, grid, tol=args.zero_tol if args.zero_tol else 0.9 * h)
    body["zero_set_size"] = cloud.size
    if cloud.size:
        scales = [2.0 ** (-k) for k in range(2, 7)]
        est = box_counting_dimension(cloud, scales)
        body["zero_set_dimension"] = est.to_dict()
        print(f"  zero set: {cloud.size} points, box-counting dimension {est.dimension:.3f}")
    else:
        print("  zero set: empty")
    env.add("analyze-map", adj_ok and k_floor_ok, body)
    env.notes.append(SCOPE_NOTE)


def _cmd_exponents(args, env: ReportEnvelope) -> None:
    rows = []
    ps = np.linspace(args.p_min, args.p_max, args.steps)
    print(f"{'p':>10s} {'epsilon':>10s} {'dim bound':>10s}")
    prev_eps = -1.0
    monotone = True
    for p in ps:
        eps = float(admissible_epsilon(args.n, float(p)))
        bound = float(hausdorff_bound(args.n, eps))
        rows.append({"p": float(p), "epsilon": eps, "dimension_bound": bound})
        monotone &= eps > prev_eps
        prev_eps = eps
        print(f"{p:10.4f} {eps:10.4f} {bound:10.4f}")
    env.add("exponents", monotone, {"n": args.n, "rows": rows})


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dilatlab", description="verification suites for mappings with integrable dilatation"
    )
    parser.add_argument("--out", help="write the JSON report envelope to this path")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common_bump(p):
        p.add_argument("--n", type=int, required=True, help="dimension (>= 2)")
        p.add_argument("--a", type=float, required=True, help="profile radius parameter")

    p = sub.add_parser("construct-bump", help="head-value search + certified coefficients")
    common_bump(p)
    p.add_argument("--c0-floor", type=float, default=None)
    p.set_defaults(fn=_cmd_construct_bump)

    p = sub.add_parser("verify-bump", help="run the eight-property suite")
    common_bump(p)
    p.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(fn=_cmd_verify_bump)

    p = sub.add_parser("nlaplacian-profile", help="CSV of r, value, slope, n-Laplacian")
    common_bump(p)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--csv", default="nlaplacian_profile.csv")
    p.set_defaults(fn=_cmd_nlaplacian_profile)

    p = sub.add_parser("check-identity", help="weak identity refinement sweep")
    p.add_argument("--map", required=True, help='mapping spec, e.g. "winding:k=2,scale=0.03"')
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--field", choices=("linear", "bump", "constant"), default="linear")
    p.add_argument("--a", type=float, default=0.01, help="profile radius for --field bump")
    p.add_argument("--resolutions", default="65,129,257")
    p.add_argument("--box", default="-1,1")
    p.add_argument("--r0", type=float, default=0.35)
    p.add_argument("--r1", type=float, default=0.85)
    p.add_argument("--min-slope", type=float, default=1.8)
    p.add_argument("--divfree-tol", type=float, default=1e-6)
    p.set_defaults(fn=_cmd_check_identity)

    p = sub.add_parser("caccioppoli", help="both sides of the energy estimate")
    p.add_argument("--map", required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--a", type=float, default=0.01)
    p.add_argument("--resolution", type=int, default=161)
    p.add_argument("--box", default="-0.045,0.045")
    p.add_argument("--r0", type=float, default=0.015)
    p.add_argument("--r1", type=float, default=0.04)
    p.set_defaults(fn=_cmd_caccioppoli)

    p = sub.add_parser("loglog-energy", help="excised log-log energy, delta trend")
    p.add_argument("--map", required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--resolution", type=int, default=257)
    p.add_argument("--box", default="-0.05,0.05")
    p.add_argument("--r0", type=float, default=0.02)
    p.add_argument("--r1", type=float, default=0.045)
    p.set_defaults(fn=_cmd_loglog_energy)

    p = sub.add_parser("analyze-map", help="differential/dilatation/energy/zero-set summary")
    p.add_argument("--map", required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--resolution", type=int, default=129)
    p.add_argument("--box", default="-1,1")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--p", type=float, default=None, help="check K in L^p by quadrature")
    p.add_argument("--zero-tol", type=float, default=None)
    p.set_defaults(fn=_cmd_analyze_map)

    p = sub.add_parser("exponents", help="epsilon/dimension-bound table over p")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p-min", type=float, default=None)
    p.add_argument("--p-max", type=float, default=None)
    p.add_argument("--p", type=float, default=None, help="single p shortcut")
    p.add_argument("--steps", type=int, default=9)
    p.set_defaults(fn=_cmd_exponents)

    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return 2 if exc.code not in (0,) else 0
    if args.subcommand == "exponents":
        if args.p is not None:
            args.p_min = args.p_max = args.p
            args.steps = 1
        if args.p_min is None or args.p_max is None:
            print("error: provide --p or both --p-min and --p-max", file=sys.stderr)
            return 2
    env = ReportEnvelope(command=["dilatlab"] + argv)
    start = time.perf_counter()
    try:
        args.fn(args, env)
    except ValueError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return 2
    except (CertificationError, ArithmeticError, RuntimeError) as exc:
        print(f"error: computation failed: {exc}", file=sys.stderr)
        env.notes.append(f"computation failed: {exc}")
        env.duration_seconds = time.perf_counter() - start
        _write_envelope(env, args.out)
        return 1
    env.duration_seconds = time.perf_counter() - start
    _write_envelope(env, args.out)
    print(f"overall: {'PASS' if env.overall_pass else 'FAIL'} "
          f"(payload sha256 {env.payload_digest()[:16]})")
    return 0 if env.overall_pass else 1


if __name__ == "__main__":
    sys.exit(main())
