"""Command-line interface: ``compnoma {capacity,sweep,validate,pdf-check}``."""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__, analytic
from ._accel import backend_name
from .errors import ModelError
from .experiments import (
    AXES,
    SweepRow,
    SweepSpec,
    _row,
    default_params,
    figure_presets,
    format_csv,
    link_table_for,
    pdf_check,
    run_sweep,
    sweep_metadata,
    validate,
    write_csv,
)
from .geometry import CellLayout, layout_from_preset
from .montecarlo import McConfig, default_seed, estimate_all
from .params import Case, OmaPower, Scheme, SystemParams

# config-file keys and how to parse them; command-line flags use the same names
_FLOAT_KEYS = ("rho_db", "sigma2_eps", "beta", "alpha", "upsilon_db", "v", "bs_height")
_INT_KEYS = ("samples", "seed", "chunk", "workers")
_STR_KEYS = ("preset", "scheme", "case", "csi", "oma_power", "method", "backend",
             "bs_positions", "ccu_positions", "ceu_position")
_BOOL_KEYS = ("ideal_sic",)


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ModelError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_").lower()
        if key in _FLOAT_KEYS:
            out[key] = float(value)
        elif key in _INT_KEYS:
            out[key] = int(value)
        elif key in _BOOL_KEYS:
            out[key] = value.lower() in ("1", "true", "yes", "on")
        elif key in _STR_KEYS:
            out[key] = value
        else:
            raise ModelError(f"config line {lineno}: unknown key {key!r}")
    return out


def _points(text: str) -> list[tuple[float, float]]:
    return [tuple(float(c) for c in p.split(",")) for p in text.split(";") if p.strip()]


def parse_values(text: str) -> list[float]:
    """``"0,5,10"`` or ``"start:stop:step"`` (stop inclusive)."""
    if ":" in text:
        start, stop, step = (float(s) for s in text.split(":"))
        n = int(round((stop - start) / step))
        return [round(start + i * step, 10) for i in range(n + 1)]
    return [float(s) for s in text.split(",") if s.strip()]


def _settings(args) -> dict:
    settings = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            settings.update(parse_config(fh.read()))
    for key in _FLOAT_KEYS + _INT_KEYS + _STR_KEYS + _BOOL_KEYS:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            settings[key] = value
    return settings


def params_from_settings(s: dict) -> SystemParams:
    base = default_params()
    beta = s.get("beta")
    alpha = s.get("alpha")
    if beta is None and alpha is None:
        alpha, beta = base.alpha, base.beta
    elif beta is None:
        beta = 1.0 - alpha
    elif alpha is None:
        alpha = 1.0 - beta
    sigma2_eps = 0.0 if s.get("csi") == "perfect" else s.get("sigma2_eps", base.sigma2_eps)
    upsilon_db = -np.inf if s.get("ideal_sic") else s.get("upsilon_db", -25.0)
    return SystemParams.from_db(
        rho_db=s.get("rho_db", 20.0),
        upsilon_db=upsilon_db,
        alpha=alpha,
        beta=beta,
        sigma2_eps=sigma2_eps,
        v=s.get("v", base.v),
        case=Case(s.get("case", "I")),
        scheme=Scheme(s.get("scheme", "NOMA")),
        oma_power=OmaPower(s.get("oma_power", "split")),
    )


def layout_from_settings(s: dict) -> tuple[str, CellLayout]:
    if "bs_positions" in s:
        layout = CellLayout(
            _points(s["bs_positions"]),
            _points(s["ccu_positions"]),
            _points(s["ceu_position"])[0],
            s.get("bs_height", 0.05),
        )
        return "custom", layout
    name = s.get("preset", "b2")
    return name, layout_from_preset(name)


def mc_from_settings(s: dict) -> McConfig:
    return McConfig(
        samples=s.get("samples", 1_000_000),
        seed=s.get("seed", default_seed()),
        chunk=s.get("chunk", 1 << 16),
        workers=s.get("workers", 1),
        backend=s.get("backend"),
    )


def _methods(s: dict) -> tuple[str, ...]:
    m = s.get("method", "both")
    return ("analytic", "monte-carlo") if m == "both" else (m,)


# subcommands ---------------------------------------------------------------


def cmd_capacity(args) -> int:
    s = _settings(args)
    params = params_from_settings(s)
    preset, layout = layout_from_settings(s)
    mc = mc_from_settings(s)
    link_table = link_table_for(layout, params)
    methods = _methods(s)
    n_bs = layout.n_bs
    case = params.case.value if params.scheme is Scheme.COMP_NOMA else None
    users = [f"CCU-{j + 1}" for j in range(n_bs)] + ["CEU", "SUM"]

    rows: list[SweepRow] = []
    for method in methods:
        if method == "analytic":
            results = analytic.all_capacities(params, link_table)
        else:
            results = estimate_all(params, link_table, mc)
        for user in users:
            rows.append(_row(preset, n_bs, params.scheme, case, method, params, user,
                             results[(params.scheme.value, case, user)], mc))

    if getattr(args, "csv", False):
        sys.stdout.write(format_csv(rows))
        return 0
    print(f"preset={preset} B={n_bs} scheme={params.scheme.value} case={case or 'NA'} "
          f"rho={params.rho_db:g} dB sigma2_eps={params.sigma2_eps:g} alpha={params.alpha:g} "
          f"beta={params.beta:g} upsilon={params.upsilon_db:g} dB")
    print(f"{'method':<12} {'user':<8} {'capacity [bits/s/Hz]':>22} {'stderr':>12}")
    for r in rows:
        print(f"{r.method:<12} {r.user:<8} {r.capacity_bits:>22.10f} {r.stderr:>12.3e}")
    return 0


def _sweep_spec(s: dict, args) -> SweepSpec:
    preset = s.get("preset", "fig4")
    figures = figure_presets()
    if preset in figures and not args.axis:
        spec = figures[preset]
        if "method" in s:
            spec = SweepSpec(**{**spec.__dict__, "methods": _methods(s)})
        return spec
    if not args.axis or args.values is None:
        raise ModelError("a custom sweep needs --axis and --values (or --preset fig4..fig8)")
    fixed = params_from_settings(s)
    return SweepSpec(
        axis=args.axis,
        values=tuple(parse_values(args.values)),
        fixed=fixed,
        presets=(preset,) if preset in ("b2", "b3") else ("b2", "b3"),
        schemes=(fixed.scheme,),
        cases=(fixed.case,),
        methods=_methods(s),
        users=tuple(args.users.split(",")) if args.users else None,
    )


def cmd_sweep(args) -> int:
    s = _settings(args)
    spec = _sweep_spec(s, args)
    mc = mc_from_settings(s)
    rows = run_sweep(spec, mc, workers=s.get("workers", 1))
    meta = sweep_metadata(spec, mc)
    if args.out in (None, "-"):
        sys.stdout.write(format_csv(rows, meta))
    else:
        write_csv(rows, args.out, meta)
        print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return 0


def cmd_validate(args) -> int:
    s = _settings(args)
    mc = mc_from_settings(s)
    hook = None
    if args.corrupt_upsilon_db is not None:
        bad = args.corrupt_upsilon_db
        hook = lambda p: p.with_(upsilon_db=bad)  # noqa: E731
    t0 = time.perf_counter()
    report = validate(args.grid, mc, base=params_from_settings(s), analytic_hook=hook)
    elapsed = time.perf_counter() - t0
    for e in report.entries:
        if args.verbose or not e.passed:
            status = "ok  " if e.passed else "FAIL"
            print(f"{status} {e.preset} rho={e.rho_db:g}dB eps={e.sigma2_eps:g} {e.scheme}"
                  f"/{e.case or 'NA'} {e.user}: analytic={e.analytic:.6f} mc={e.mc_mean:.6f} "
                  f"|d|/se={e.ratio:.2f}")
    print(f"{len(report.entries)} comparisons, max |analytic - mc| / stderr = "
          f"{report.max_ratio:.3f}, {len(report.failures())} above 3 "
          f"({mc.samples} samples, seed {mc.seed}, {backend_name()} backend, {elapsed:.1f} s)")
    print("PASS" if report.passed else "FAIL")
    return 0 if report.passed else 1


def cmd_pdf_check(args) -> int:
    results = pdf_check(ks_samples=args.ks_samples, seed=args.seed or 0)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _model_args() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model")
    g.add_argument("--config", help="key = value configuration file")
    g.add_argument("--rho-db", dest="rho_db", type=float, help="transmit SNR in dB (default 20)")
    g.add_argument("--sigma2-eps", dest="sigma2_eps", type=float,
                   help="channel estimation error variance (default 0)")
    g.add_argument("--beta", type=float, help="CEU power fraction (default 0.95)")
    g.add_argument("--alpha", type=float, help="CCU power fraction (default 1 - beta)")
    g.add_argument("--upsilon-db", dest="upsilon_db", type=float,
                   help="residual SIC interference in dB (default -25)")
    g.add_argument("--ideal-sic", dest="ideal_sic", action="store_true",
                   help="set the residual SIC interference to zero")
    g.add_argument("--csi", choices=("perfect", "imperfect"),
                   help="perfect forces sigma2_eps = 0")
    g.add_argument("--scheme", choices=[s.value for s in Scheme])
    g.add_argument("--case", choices=[c.value for c in Case])
    g.add_argument("--oma-power", dest="oma_power", choices=[o.value for o in OmaPower],
                   help="power inside an OMA slot (default split: alpha/beta)")
    g.add_argument("--method", choices=("analytic", "monte-carlo", "both"))
    m = p.add_argument_group("monte carlo")
    m.add_argument("--samples", type=int, help="samples per point (default 1e6)")
    m.add_argument("--seed", type=int, help="64-bit seed (default $COMPNOMA_SEED)")
    m.add_argument("--chunk", type=int, help="samples per work unit")
    m.add_argument("--workers", type=int, help="worker threads")
    m.add_argument("--backend", choices=("numba", "numpy"))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compnoma", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _model_args()

    p = sub.add_parser("capacity", parents=[common], help="capacities at one parameter point")
    p.add_argument("--preset", choices=("b2", "b3"))
    p.add_argument("--csv", action="store_true", help="emit CSV rows instead of a table")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("sweep", parents=[common], help="parameter sweep to CSV")
    p.add_argument("--preset", choices=("b2", "b3", "fig4", "fig5", "fig6", "fig7", "fig8"))
    p.add_argument("--axis", choices=AXES)
    p.add_argument("--values", help="comma list or start:stop:step")
    p.add_argument("--users", help="comma list, e.g. CCU-1,CEU")
    p.add_argument("--out", help="CSV path ('-' for stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", parents=[common], help="closed forms vs Monte Carlo")
    p.add_argument("--grid", choices=("default", "quick"), default="default")
    p.add_argument("--corrupt-upsilon-db", type=float,
                   help="evaluate the closed forms with this upsilon (validator self-test)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("pdf-check", help="hypoexponential density self-checks")
    p.add_argument("--ks-samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_pdf_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
