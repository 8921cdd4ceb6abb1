"""Parameter sweeps, analytic-vs-simulation validation and CSV output."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from . import __version__, analytic, checks, hypoexp
from ._accel import backend_name
from .channel import LinkTable, build_link_table
from .errors import ParameterError
from .geometry import CellLayout, distances, layout_from_preset
from .hypoexp import RateKind, RateSet
from .montecarlo import McConfig, estimate_all
from .params import Case, Scheme, SystemParams

AXES = ("rho_dB", "sigma2_eps", "beta")
METHODS = ("analytic", "monte-carlo")
NO_CASE = "NA"


def link_table_for(layout: CellLayout, params: SystemParams) -> LinkTable:
    return build_link_table(distances(layout), params.v, params.sigma2_eps)


def default_params() -> SystemParams:
    """r = 1, h = 0.05, v = 4, alpha = 0.05, beta = 0.95, upsilon = -25 dB, rho = 20 dB."""
    return SystemParams.from_db(rho_db=20.0, upsilon_db=-25.0, alpha=0.05, beta=0.95, v=4.0)


def _apply(params: SystemParams, name: str, value: float) -> SystemParams:
    if name in ("rho_dB", "rho_db"):
        return params.with_(rho_db=value)
    if name in ("upsilon_dB", "upsilon_db"):
        return params.with_(upsilon_db=value)
    if name in ("sigma2_eps", "beta", "alpha", "v"):
        return params.with_(**{name: value})
    raise ParameterError(f"unknown sweep parameter {name!r}")


@dataclass(frozen=True)
class SweepSpec:
    """A one-axis parameter grid, repeated over ``series`` overrides.

    ``series`` entries are dicts of fixed-parameter overrides (e.g. one per
    error variance); an empty tuple means a single run with ``fixed``.
    ``users=None`` emits every CCU plus CEU, SUM and CCU-SUM.
    """

    axis: str
    values: tuple[float, ...]
    fixed: SystemParams = field(default_factory=default_params)
    series: tuple[dict, ...] = ()
    presets: tuple[str, ...] = ("b2", "b3")
    schemes: tuple[Scheme, ...] = (Scheme.COMP_NOMA,)
    cases: tuple[Case, ...] = (Case.CASE_I,)
    methods: tuple[str, ...] = ("analytic",)
    users: tuple[str, ...] | None = None
    name: str = "custom"

    def __post_init__(self):
        if self.axis not in AXES:
            raise ParameterError(f"axis must be one of {AXES}, got {self.axis!r}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ParameterError("sweep values must be nonempty")
        if any(b < a for a, b in zip(values, values[1:])):
            raise ParameterError("sweep values must be sorted ascending")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "schemes", tuple(Scheme(s) for s in self.schemes))
        object.__setattr__(self, "cases", tuple(Case(c) for c in self.cases))
        for m in self.methods:
            if m not in METHODS:
                raise ParameterError(f"unknown method {m!r}")
        for p in self.presets:
            layout_from_preset(p)
        for point in self.points():
            self.params_at(point[0], point[1])

    def points(self) -> list[tuple[dict, float]]:
        series = self.series or ({},)
        return [(s, v) for s in series for v in self.values]

    def params_at(self, overrides: dict, value: float) -> SystemParams:
        params = self.fixed
        for key, val in overrides.items():
            params = _apply(params, key, val)
        return _apply(params, self.axis, value)


@dataclass(frozen=True)
class SweepRow:
    preset: str
    scheme: str
    case: str
    method: str
    B: int
    rho_dB: float
    sigma2_eps: float
    alpha: float
    beta: float
    upsilon_dB: float
    user: str
    capacity_bits: float
    stderr: float
    samples: int | None
    seed: int | None


FIELDNAMES = [f.name for f in fields(SweepRow)]


def _series_range(start: float, stop: float, step: float) -> tuple[float, ...]:
    n = int(round((stop - start) / step))
    return tuple(round(start + i * step, 10) for i in range(n + 1))


def figure_presets() -> dict[str, SweepSpec]:
    """Sweeps behind each results figure (analytic + Monte Carlo)."""
    both = ("analytic", "monte-carlo")
    snr = _series_range(0.0, 30.0, 5.0)
    err = _series_range(0.0, 0.05, 0.01)
    at_20db = default_params()
    return {
        "fig4": SweepSpec(
            "rho_dB", snr, series=({"sigma2_eps": 0.0}, {"sigma2_eps": 0.001}),
            schemes=(Scheme.COMP_NOMA, Scheme.COMP_OMA), cases=(Case.CASE_I, Case.CASE_II),
            methods=both, users=("SUM",), name="fig4",
        ),
        "fig5": SweepSpec(
            "rho_dB", snr,
            series=({"sigma2_eps": 0.0}, {"sigma2_eps": 0.01}, {"sigma2_eps": 0.05}),
            methods=both, users=("SUM",), name="fig5",
        ),
        "fig6": SweepSpec(
            "sigma2_eps", err, fixed=at_20db, schemes=(Scheme.COMP_NOMA, Scheme.COMP_OMA),
            methods=both, users=("CCU-SUM",), name="fig6",
        ),
        "fig7": SweepSpec(
            "sigma2_eps", err, fixed=at_20db, methods=both, users=("CCU-1", "CEU"), name="fig7",
        ),
        "fig8": SweepSpec(
            "beta", _series_range(0.5, 0.95, 0.025), fixed=at_20db,
            series=({"sigma2_eps": 0.0}, {"sigma2_eps": 0.05}),
            methods=both, users=("CCU-1", "CEU"), name="fig8",
        ),
    }


def _users_for(n_bs: int, users) -> list[str]:
    if users is None:
        return [f"CCU-{j + 1}" for j in range(n_bs)] + ["CEU", "SUM", "CCU-SUM"]
    return list(users)


def evaluate_point(layout: CellLayout, params: SystemParams, methods, mc: McConfig | None):
    """Analytic and/or Monte Carlo results for one parameter point."""
    link_table = link_table_for(layout, params)
    out = {}
    if "analytic" in methods:
        out["analytic"] = analytic.all_capacities(params, link_table)
    if "monte-carlo" in methods:
        out["monte-carlo"] = estimate_all(params, link_table, mc)
    return out


def run_sweep(spec: SweepSpec, mc: McConfig | None = None, workers: int = 1) -> list[SweepRow]:
    """Evaluate every grid point; rows come back in grid order.

    Order: series, preset, scheme, case, axis value, method, user.
    """
    mc = mc or McConfig()
    series = spec.series or ({},)
    jobs = [(k, v, p) for k in range(len(series)) for v in spec.values for p in spec.presets]

    def run(job):
        k, value, preset = job
        params = spec.params_at(series[k], value)
        return params, evaluate_point(layout_from_preset(preset), params, spec.methods, mc)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = dict(zip(jobs, pool.map(run, jobs)))
    else:
        results = {job: run(job) for job in jobs}

    rows = []
    for k in range(len(series)):
        for preset in spec.presets:
            n_bs = layout_from_preset(preset).n_bs
            for scheme in spec.schemes:
                cases = spec.cases if scheme is Scheme.COMP_NOMA else (None,)
                for case in cases:
                    for value in spec.values:
                        params, res = results[(k, value, preset)]
                        key_case = case.value if case is not None else None
                        for method in spec.methods:
                            for user in _users_for(n_bs, spec.users):
                                rows.append(_row(preset, n_bs, scheme, key_case, method, params,
                                                 user, res[method][(scheme.value, key_case, user)], mc))
    return rows


def _row(preset, n_bs, scheme, case, method, params, user, value, mc) -> SweepRow:
    if method == "analytic":
        cap, err, samples, seed = float(value), 0.0, None, None
    else:
        cap, err, samples, seed = value.mean, value.stderr, value.samples, mc.seed
    return SweepRow(
        preset=preset, scheme=scheme.value, case=case or NO_CASE, method=method, B=n_bs,
        rho_dB=params.rho_db, sigma2_eps=params.sigma2_eps, alpha=params.alpha,
        beta=params.beta, upsilon_dB=params.upsilon_db, user=user, capacity_bits=cap,
        stderr=err, samples=samples, seed=seed,
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def format_csv(rows: list[SweepRow], metadata: dict | None = None) -> str:
    buf = io.StringIO()
    if metadata:
        buf.write("# " + " ".join(f"{k}={v}" for k, v in metadata.items()) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FIELDNAMES)
    for row in rows:
        writer.writerow([_fmt(getattr(row, name)) for name in FIELDNAMES])
    return buf.getvalue()


def write_csv(rows: list[SweepRow], path: str, metadata: dict | None = None) -> None:
    """Write atomically: a temp file in the target directory, renamed on success."""
    text = format_csv(rows, metadata)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".sweep-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


_PARSERS = {
    "B": int, "rho_dB": float, "sigma2_eps": float, "alpha": float, "beta": float,
    "upsilon_dB": float, "capacity_bits": float, "stderr": float,
    "samples": lambda s: int(s) if s else None, "seed": lambda s: int(s) if s else None,
}


def read_csv(source) -> list[SweepRow]:
    if isinstance(source, str) and os.path.exists(source):
        with open(source, newline="") as fh:
            text = fh.read()
    else:
        text = source
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames != FIELDNAMES:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [SweepRow(**{k: _PARSERS.get(k, str)(v) for k, v in rec.items()}) for rec in reader]


def sweep_metadata(spec: SweepSpec, mc: McConfig) -> dict:
    return {
        "tool": "compnoma",
        "version": __version__,
        "sweep": spec.name,
        "seed": mc.seed,
        "samples": mc.samples,
        "backend": mc.backend or backend_name(),
        "upsilon_dB": _fmt(spec.fixed.upsilon_db),
        "ideal_sic": spec.fixed.upsilon == 0,
        "oma_power": spec.fixed.oma_power.value,
    }


# validation ---------------------------------------------------------------

VALIDATION_GRIDS = {
    "default": dict(presets=("b2", "b3"), rho_db=(0.0, 10.0, 20.0, 30.0),
                    sigma2_eps=(0.0, 0.001, 0.01, 0.05)),
    "quick": dict(presets=("b2", "b3"), rho_db=(10.0, 30.0), sigma2_eps=(0.0, 0.05)),
}

Z_LIMIT = 3.0


@dataclass(frozen=True)
class ValidationEntry:
    preset: str
    rho_db: float
    sigma2_eps: float
    scheme: str
    case: str | None
    user: str
    analytic: float
    mc_mean: float
    mc_stderr: float

    @property
    def ratio(self) -> float:
        return abs(self.analytic - self.mc_mean) / self.mc_stderr

    @property
    def passed(self) -> bool:
        return self.ratio <= Z_LIMIT


@dataclass
class ValidationReport:
    entries: list[ValidationEntry]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def max_ratio(self) -> float:
        return max(e.ratio for e in self.entries)

    def failures(self) -> list[ValidationEntry]:
        return [e for e in self.entries if not e.passed]


def validate(grid: str = "default", mc: McConfig | None = None, base: SystemParams | None = None,
             analytic_hook=None) -> ValidationReport:
    """Compare every closed form with its Monte Carlo estimate across a grid.

    ``analytic_hook`` maps the parameters used for the closed forms only; it
    exists to check that a corrupted analytic path is caught.
    """
    mc = mc or McConfig()
    base = base or default_params()
    g = VALIDATION_GRIDS[grid]
    entries = []
    for preset in g["presets"]:
        layout = layout_from_preset(preset)
        for rho_db in g["rho_db"]:
            for eps in g["sigma2_eps"]:
                params = base.with_(rho_db=rho_db, sigma2_eps=eps)
                link_table = link_table_for(layout, params)
                a_params = analytic_hook(params) if analytic_hook else params
                exact = analytic.all_capacities(a_params, link_table)
                sim = estimate_all(params, link_table, mc)
                for key, value in exact.items():
                    est = sim[key]
                    entries.append(ValidationEntry(preset, rho_db, eps, key[0], key[1], key[2],
                                                   value, est.mean, est.stderr))
    return ValidationReport(entries)


# hypoexponential self-check -------------------------------------------------


def preset_rate_sets(params: SystemParams | None = None) -> dict[str, RateSet]:
    """Rate sets that the closed forms actually use, for both layout presets."""
    params = params or default_params().with_(sigma2_eps=0.01)
    out = {}
    for preset in ("b2", "b3"):
        lt = link_table_for(layout_from_preset(preset), params)
        for j in range(lt.n_bs):
            out[f"{preset} CCU-{j + 1} full"] = hypoexp.rates_ccu(lt, j, params.alpha, params.rho)
            out[f"{preset} CCU-{j + 1} interference"] = hypoexp.rates_ccu(
                lt, j, params.alpha, params.rho, include_own=False)
        out[f"{preset} CEU numerator"] = hypoexp.rates_ceu(lt, params.alpha, params.rho, RateKind.CEU_NUM)
        out[f"{preset} CEU denominator"] = hypoexp.rates_ceu(lt, params.alpha, params.rho, RateKind.CEU_DEN)
    out["rates {1,2}"] = RateSet([1.0, 2.0])
    out["single rate {2}"] = RateSet([2.0])
    return out


def pdf_check(ks_samples: int = 100_000, seed: int = 0) -> list[checks.CheckResult]:
    results = []
    for i, (label, rs) in enumerate(preset_rate_sets().items()):
        results.extend(checks.run_rate_set_checks(label, rs, ks_samples, seed + i))
    single = RateSet([2.0])
    xs = np.linspace(0.0, 5.0, 51)
    exact = float(np.max(np.abs(hypoexp.cdf(single, xs) - (1.0 - np.exp(-2.0 * xs)))))
    results.append(checks.CheckResult("single rate {2} exact exponential CDF", exact, 1e-15,
                                      exact <= 1e-15))
    return results
