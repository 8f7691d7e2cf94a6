"""Batch command-line front door.

Every subcommand wraps public operations of the library, emits CSV for
sweeps and JSON for scalar reports, and tags each output row with the claim
it checks.  Outputs are deterministic for a fixed invocation: sweeps run in
a thread pool (capped by QUANTLAB_THREADS) but results are merged in input
order, and floats are serialized with shortest round-trip repr.

Exit codes: 0 success, 1 a numerical check failed (a machine-readable
failure record is printed), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import algebra, cocycle, sections, surface_index, toeplitz
from .dolbeault import build_dolbeault, spectral_report, weitzenbock_residual
from .errors import ConfigError, QuantLabError

# registry: public operation -> subcommand that exposes it
OPERATION_COVERAGE = {
    "algebra.multiply": "algebra",
    "algebra.involution": "algebra",
    "algebra.trace": "algebra",
    "algebra.regular_representation": "algebra",
    "algebra.norm_estimate": "algebra",
    "algebra.norm_profile": "algebra",
    "cocycle.exterior_derivative": "cocycle-check",
    "cocycle.pullback": "cocycle-check",
    "cocycle.solve_phi": "cocycle-check",
    "cocycle.derive_cocycle": "cocycle-check",
    "cocycle.cocycle_table": "cocycle-check",
    "sections.project_act": "module-gram",
    "sections.l2_inner": "module-gram",
    "sections.module_inner": "module-gram",
    "sections.module_trace": "module-gram",
    "sections.gram_positivity": "module-gram",
    "dolbeault.build_dolbeault": "spectral",
    "dolbeault.kernel_dimension": "spectral",
    "dolbeault.spectral_report": "spectral",
    "dolbeault.weitzenbock_residual": "spectral",
    "dolbeault.kernel_basis": "spectral",
    "toeplitz.toeplitz": "toeplitz-sweep",
    "toeplitz.product_defect": "toeplitz-sweep",
    "toeplitz.commutator_defect": "toeplitz-sweep",
    "toeplitz.first_order_defect": "toeplitz-sweep",
    "toeplitz.trace_limit_defect": "toeplitz-sweep",
    "toeplitz.weyl_relation": "weyl",
    "toeplitz.bargmann_matrix_element": "bargmann",
    "toeplitz.heisenberg_generator_check": "heisenberg",
    "surface_index.l2_index": "index",
    "surface_index.natsume_nest_trace": "index",
    "surface_index.numeric_index_crosscheck": "index",
}


def _threads() -> int:
    raw = os.environ.get("QUANTLAB_THREADS", "")
    try:
        cap = int(raw) if raw else 4
    except ValueError:
        raise ConfigError(f"QUANTLAB_THREADS must be an integer, got {raw!r}")
    return max(1, cap)


def _parse_range(text: str) -> list[int]:
    """'4..32' -> inclusive integer range; '4,8,16' -> explicit list."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part]


def _subsample(values: list[int], count: int) -> list[int]:
    if count >= len(values) or count < 2:
        return values
    picks = np.unique(
        np.round(np.geomspace(values[0], values[-1], count)).astype(int)
    )
    chosen = sorted({min(values, key=lambda v: abs(v - p)) for p in picks})
    return chosen


def _write_rows(path: str | None, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    text = buf.getvalue()
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=repr) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_element(spec_text: str) -> algebra.AlgebraElement:
    if spec_text == "harper":
        return algebra.harper_element(algebra.KappaCocycle(), 0.0)
    if os.path.exists(spec_text):
        with open(spec_text) as fh:
            return algebra.AlgebraElement.from_json(fh.read())
    return algebra.AlgebraElement.from_json(spec_text)


def _load_symbol(name_or_path: str) -> toeplitz.TrigPolynomial:
    if name_or_path in toeplitz.NAMED_SYMBOLS:
        return toeplitz.named_symbol(name_or_path)
    with open(name_or_path) as fh:
        data = json.load(fh)
    return toeplitz.TrigPolynomial(
        {(r["j"], r["k"]): complex(r["re"], r.get("im", 0.0)) for r in data["modes"]}
    )


def _gauge_potential(name: str, omega0: float) -> cocycle.OneForm:
    if name == "symmetric":
        return cocycle.symmetric_gauge(omega0)
    if name == "landau":
        return cocycle.landau_gauge(omega0)
    raise ConfigError(f"unknown potential gauge {name!r}")


def _cmd_cocycle_check(args) -> int:
    A = _gauge_potential(args.potential, args.omega0)
    points, values, residual = cocycle.cocycle_grid(A, args.radius)
    kappa = args.omega0 / 2.0
    closed_dev = 0.0
    rows = []
    for i, g1 in enumerate(points):
        for j, g2 in enumerate(points):
            rows.append(["cocycle-value", g1[0], g1[1], g2[0], g2[1], float(values[i, j])])
            if args.potential == "symmetric":
                closed_dev = max(
                    closed_dev,
                    abs(values[i, j] - kappa * (g1[1] * g2[0] - g1[0] * g2[1])),
                )
    index = {g: i for i, g in enumerate(points)}
    identity_residual = 0.0
    small = [g for g in points if max(abs(g[0]), abs(g[1])) <= max(1, args.radius // 2)]
    for g1 in small:
        for g2 in small:
            for g3 in small:
                g12, g23 = algebra.compose(g1, g2), algebra.compose(g2, g3)
                if g12 not in index or g23 not in index:
                    continue
                ident = (
                    values[index[g2], index[g3]]
                    - values[index[g12], index[g3]]
                    + values[index[g1], index[g23]]
                    - values[index[g1], index[g2]]
                )
                identity_residual = max(identity_residual, abs(ident))
    _write_rows(args.output, ["claim", "n1", "m1", "n2", "m2", "value"], rows)
    _emit_json(
        None,
        {
            "claim": "cocycle-constancy-and-identity",
            "pairs": len(rows),
            "constancy_residual": residual,
            "identity_residual": identity_residual,
            "closed_form_deviation": closed_dev if args.potential == "symmetric" else None,
        },
    )
    if identity_residual > 1e-10 or residual > 1e-10:
        return 1
    return 0


def _cmd_algebra(args) -> int:
    kc = algebra.KappaCocycle(args.kappa)
    if args.mode == "mult":
        a = _load_element(args.a)
        b = _load_element(args.b)
        product = algebra.multiply(a, b, kc, args.s)
        _emit_json(args.output, {"claim": "algebra-product", "result": json.loads(product.to_json())})
        return 0
    if args.mode == "trace":
        a = _load_element(args.a)
        value = algebra.trace(a, kc, args.s)
        _emit_json(args.output, {"claim": "algebra-trace", "re": value.real, "im": value.imag})
        return 0
    if args.mode == "norm":
        a = _load_element(args.a)
        value = algebra.norm_estimate(a, kc, args.s, args.radius)
        _emit_json(
            args.output,
            {"claim": "algebra-norm", "norm": value, "radius": args.radius, "l1_bound": a.l1_norm()},
        )
        return 0
    if args.mode == "norm-profile":
        a = _load_element(args.a)
        grid = [float(v) for v in args.s_grid.split(",")]
        profile = algebra.norm_profile(
            a, grid, kc, args.radius, continuity_threshold=args.continuity_threshold
        )
        rows = [["norm-continuity", s, norm] for s, norm in profile]
        _write_rows(args.output, ["claim", "s", "norm"], rows)
        return 0
    raise ConfigError(f"unknown algebra mode {args.mode!r}")


def _cmd_module_gram(args) -> int:
    kc = algebra.KappaCocycle()
    if args.sections:
        with open(args.sections) as fh:
            secs = [sections.GaussianSection.from_json(line) for line in fh if line.strip()]
    else:
        secs = [sections.vacuum(args.s)]
    report = sections.gram_positivity(secs, kc, args.s, args.radius, args.rep_radius)
    gram = sections.module_inner(secs[0], secs[0], args.radius)
    vac_dev = None
    if not args.sections:
        vac_dev = max(
            abs(z - math.exp(-(math.pi * args.s / 2.0) * (n * n + m * m)) / args.s)
            for (n, m), z in gram.terms.items()
        )
    payload = {
        "claim": "module-gram-positivity",
        "min_eigenvalue": report["min_eigenvalue"],
        "dimension": report["dimension"],
        "tail_bound": report["tail_bound"],
        "vacuum_coefficient_deviation": vac_dev,
    }
    _emit_json(args.output, payload)
    return 0 if report["min_eigenvalue"] >= -1e-9 else 1


def _cmd_spectral(args) -> int:
    pair = build_dolbeault(args.n_flux, args.grid, args.gauge)
    rep = spectral_report(pair, slack=args.slack)
    resid = weitzenbock_residual(pair)
    cross = surface_index.numeric_index_crosscheck(args.n_flux, args.grid, args.gauge)
    if args.export_kernel:
        from .dolbeault import kernel_basis

        basis = kernel_basis(pair)
        header = []
        for col in range(basis.shape[1]):
            header += [f"re{col}", f"im{col}"]
        rows = []
        for site in range(basis.shape[0]):  # grid row-major
            row = []
            for col in range(basis.shape[1]):
                row += [float(basis[site, col].real), float(basis[site, col].imag)]
            rows.append(row)
        _write_rows(args.export_kernel, header, rows)
    payload = {
        "claim": "dolbeault-spectral-report",
        "kernel_dim": rep.kernel_dim,
        "coker_dim": rep.coker_dim,
        "sigma_min_nonzero": rep.sigma_min_nonzero,
        "gap_degree1": rep.gap_degree1,
        "parametrix_norm": rep.parametrix_norm,
        "curvature_commutator_residual": resid,
        "index_crosscheck": cross,
    }
    _emit_json(args.output, payload)
    return 0


def _sweep_cell(f, g, n_flux, grid_rule):
    grid = max(16, grid_rule * n_flux)
    return {
        "N": n_flux,
        "M": grid,
        "product-defect-decay": toeplitz.product_defect(f, g, n_flux, grid),
        "commutator-defect-decay": toeplitz.commutator_defect(f, g, n_flux, grid),
        "first-order-defect-decay": toeplitz.first_order_defect(f, g, n_flux, grid),
        "trace-limit": toeplitz.trace_limit_defect(f, n_flux, grid),
    }


def _cmd_toeplitz_sweep(args) -> int:
    fname, gname = args.fg.split(",", 1)
    f = _load_symbol(fname)
    g = _load_symbol(gname)
    flux_values = _subsample(_parse_range(args.N), args.samples)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        cells = list(
            pool.map(lambda n: _sweep_cell(f, g, n, args.grid_rule), flux_values)
        )
    rows = []
    for claim in (
        "product-defect-decay",
        "commutator-defect-decay",
        "first-order-defect-decay",
        "trace-limit",
    ):
        seen_n, seen_v = [], []
        for cell in cells:
            seen_n.append(cell["N"])
            seen_v.append(cell[claim])
            slope = toeplitz.fit_loglog_slope(seen_n, seen_v)
            rows.append([claim, cell["N"], cell["M"], cell[claim], slope])
    _write_rows(args.output, ["claim", "N", "M", "defect", "fitted_slope_so_far"], rows)
    return 0


def _cmd_weyl(args) -> int:
    rows = []
    worst = 0.0
    for n in _parse_range(args.N):
        scalar = toeplitz.weyl_relation(n, max(16, args.grid_rule * n))
        dev = min(
            abs(scalar - cmath.exp(2j * math.pi / n)),
            abs(scalar - cmath.exp(-2j * math.pi / n)),
        )
        worst = max(worst, dev)
        rows.append(["weyl-scalar", n, scalar.real, scalar.imag, dev])
    _write_rows(args.output, ["claim", "N", "re", "im", "deviation"], rows)
    return 0 if worst <= 1e-8 else 1


def _cmd_bargmann(args) -> int:
    rows = []
    worst = 0.0
    for j in _parse_range(args.j):
        for k in _parse_range(args.k):
            value = toeplitz.bargmann_matrix_element(j, k, args.s)
            closed = math.exp(-math.pi * (j * j + k * k) / args.s) / args.s
            dev = abs(value - closed)
            worst = max(worst, dev)
            rows.append(["vacuum-fourier-overlap", j, k, value.real, value.imag, closed, dev])
    _write_rows(
        args.output, ["claim", "j", "k", "re", "im", "closed_form", "deviation"], rows
    )
    return 0 if worst <= 1e-8 else 1


def _cmd_heisenberg(args) -> int:
    report = toeplitz.heisenberg_generator_check(args.s, args.truncation)
    scalar = report["group_commutator_scalar"]
    expected = report["group_commutator_expected"]
    payload = {
        "claim": "heisenberg-generators",
        "commutator_residual": report["commutator_residual"],
        "group_commutator": [scalar.real, scalar.imag],
        "expected": [expected.real, expected.imag],
        "scalar_deviation": abs(scalar - expected),
        "zero_mode_residual": report["zero_mode_residual"],
    }
    _emit_json(args.output, payload)
    return 0


def _cmd_index(args) -> int:
    payload = {
        "claim": "surface-index",
        "l2_index": surface_index.l2_index(args.g, args.vol, args.s, args.d0),
    }
    if args.g >= 2 and args.d0 == 0.0 and args.vol == float(args.g - 1):
        payload["natsume_nest"] = surface_index.natsume_nest_trace(args.g, args.s)
    _emit_json(args.output, payload)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantlab",
        description="flat-torus quantization laboratory: cocycles, twisted algebras, "
        "magnetic spectra, Toeplitz asymptotics, index checks",
    )
    parser.add_argument("--config", help="JSON file overriding subcommand options")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cocycle-check", help="derive the cocycle and check identities")
    p.add_argument("--potential", default="symmetric", choices=("symmetric", "landau"))
    p.add_argument("--omega0", type=float, default=2.0 * math.pi)
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_cocycle_check)

    p = sub.add_parser("algebra", help="twisted algebra arithmetic and norms")
    p.add_argument("--mode", required=True, choices=("mult", "trace", "norm", "norm-profile"))
    p.add_argument("--a", default="harper", help="element JSON (inline or path) or 'harper'")
    p.add_argument("--b", default="harper")
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--kappa", type=float, default=math.pi)
    p.add_argument("--radius", type=int, default=20)
    p.add_argument("--s-grid", default="0.0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")
    p.add_argument("--continuity-threshold", type=float, default=None)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_algebra)

    p = sub.add_parser("module-gram", help="module inner products and positivity")
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--rep-radius", type=int, default=6)
    p.add_argument("--sections", help="path with one section JSON per line")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_module_gram)

    p = sub.add_parser("spectral", help="lattice Dolbeault spectra and bounds")
    p.add_argument("--n-flux", type=int, required=True)
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--gauge", default="landau", choices=("landau", "symmetric-periodic"))
    p.add_argument("--slack", type=float, default=0.1)
    p.add_argument("--export-kernel", help="write the kernel basis as CSV (re/im columns)")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_spectral)

    p = sub.add_parser("toeplitz-sweep", help="defect decay sweep over the flux")
    p.add_argument("--fg", default="cos2pix,cos2piy", help="two symbols, comma separated")
    p.add_argument("--N", default="4..32")
    p.add_argument("--samples", type=int, default=7)
    p.add_argument("--grid-rule", type=int, default=8, help="grid = max(16, rule * N)")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_toeplitz_sweep)

    p = sub.add_parser("weyl", help="noncommutative-torus scalar of the polar factors")
    p.add_argument("--N", default="2..12")
    p.add_argument("--grid-rule", type=int, default=8)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_weyl)

    p = sub.add_parser("bargmann", help="vacuum Fourier overlaps vs the closed form")
    p.add_argument("--j", default="0..3")
    p.add_argument("--k", default="0..3")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_bargmann)

    p = sub.add_parser("heisenberg", help="generator commutation on the oscillator ladder")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--truncation", type=int, default=60)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_heisenberg)

    p = sub.add_parser("index", help="closed-form surface index and trace values")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--vol", type=float, default=None)
    p.add_argument("--d0", type=float, default=0.0)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_index)

    return parser


def _apply_config(args, parser) -> None:
    if not args.config:
        return
    try:
        with open(args.config) as fh:
            overrides = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}")
    if not isinstance(overrides, dict):
        raise ConfigError("config must be a JSON object")
    valid = set(vars(args))
    for key, value in overrides.items():
        dest = key.replace("-", "_")
        if dest not in valid:
            raise ConfigError(f"unknown config key {key!r}")
        if dest in ("radius", "rep_radius", "grid", "n_flux", "samples", "truncation") and (
            not isinstance(value, int) or isinstance(value, bool)
        ):
            raise ConfigError(f"config key {key!r} must be an integer")
        if dest in ("s", "kappa", "omega0", "slack", "vol", "d0") and not isinstance(
            value, (int, float)
        ):
            raise ConfigError(f"config key {key!r} must be a number")
        if dest in ("slack",) and value <= 0:
            raise ConfigError(f"config key {key!r} must be positive")
        setattr(args, dest, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, parser)
        if getattr(args, "vol", 0.0) is None:
            args.vol = float(max(args.g - 1, 1))
        return args.func(args)
    except ConfigError as exc:
        _emit_json(None, {"status": "config-error", "message": str(exc)})
        return 2
    except QuantLabError as exc:
        _emit_json(
            None,
            {"status": "failed", "error": type(exc).__name__, "message": str(exc)},
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
