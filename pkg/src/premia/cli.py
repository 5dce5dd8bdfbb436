"""``premia`` command line: one subcommand per model operation.

Every subcommand reads its defaults from a named config (``--config``) and
lets flags override them. Output on stdout is a header of resolved inputs
followed by aligned tables with floats at six significant digits; wall time
goes to stderr so stdout is reproducible byte for byte. ``--out`` writes the
main table as full-precision CSV.

Exit status: 0 on success, 1 on a model-level error (the error class name is
printed), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import calibration, disaster, habit, hetero, lognormal, lrr, markov
from .core import LogNormalGrowth, MomentTargets, PreferenceParams
from .data_io import (
    DatasetManifest,
    ModelConfig,
    csv_value,
    format_table,
    load_config,
    load_series,
    parse_number,
    write_table_csv,
)
from .errors import PremiaError, SchemaError
from .stats import lag1_autocorr


class UsageError(Exception):
    pass


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list]


@dataclass
class RunReport:
    """Everything a run printed, plus the wall time it took."""

    subcommand: str
    config: str | None
    params: dict
    tables: list[Table]
    seeds: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def render(self) -> str:
        lines = [f"# premia {self.subcommand}"]
        if self.config is not None:
            lines.append(f"# config = {self.config}")
        for key, value in self.params.items():
            lines.append(f"# {key} = {_param_text(value)}")
        for key, value in self.seeds.items():
            lines.append(f"# {key} = {value}")
        out = "\n".join(lines) + "\n"
        for i, table in enumerate(self.tables):
            out += "\n"
            if i > 0 or len(self.tables) > 1:
                out += f"[{table.name}]\n"
            out += format_table(table.columns, table.rows)
        return out


def _param_text(value) -> str:
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(csv_value(v) for v in value) + "]"
    if value is None:
        return "none"
    return csv_value(value)


# ---------------------------------------------------------------- option helpers


class _Resolver:
    """Flag value if given, else the config's ``defaults`` entry."""

    def __init__(self, args: argparse.Namespace, cfg: ModelConfig | None):
        self.args = args
        self.cfg = cfg
        self.used: dict[str, Any] = {}

    def get(self, name: str, default: Any = ..., record: bool = True):
        value = getattr(self.args, name, None)
        if value is None and self.cfg is not None:
            value = self.cfg.defaults.get(name)
        if value is None:
            if default is ...:
                raise UsageError(f"--{name.replace('_', '-')} is required (not set by flag or config)")
            value = default
        if record:
            self.used[name] = value
        return value

    def number(self, name: str, default: Any = ...) -> float:
        value = self.get(name, default, record=False)
        value = value if value is None else _to_float(value, name)
        self.used[name] = value
        return value

    def integer(self, name: str, default: Any = ...) -> int:
        value = self.get(name, default, record=False)
        try:
            out = int(value)
        except (TypeError, ValueError):
            raise UsageError(f"--{name.replace('_', '-')}: expected an integer, got {value!r}") from None
        if out != _to_float(value, name):
            raise UsageError(f"--{name.replace('_', '-')}: expected an integer, got {value!r}")
        self.used[name] = out
        return out

    def numbers(self, name: str, length: int | None = None, default: Any = ...) -> list[float]:
        value = self.get(name, default, record=False)
        if isinstance(value, str):
            value = [v for v in value.split(",") if v.strip()]
        out = [_to_float(v, name) for v in value]
        if length is not None and len(out) != length:
            raise UsageError(f"--{name.replace('_', '-')}: expected {length} comma-separated numbers")
        self.used[name] = out
        return out

    def flag(self, name: str, default: Any = ...) -> bool:
        value = self.get(name, default, record=False)
        if isinstance(value, str):
            if value not in ("on", "off"):
                raise UsageError(f"--{name}: expected on or off, got {value!r}")
            value = value == "on"
        value = bool(value)
        self.used[name] = value
        return value


def _to_float(value, name: str) -> float:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    try:
        return parse_number(str(value))
    except ValueError:
        raise UsageError(f"--{name.replace('_', '-')}: expected a number, got {value!r}") from None


def _default_alpha(r: _Resolver):
    return ... if r.cfg is None or r.cfg.preferences is None else r.cfg.preferences.alpha


def _prefs(r: _Resolver) -> PreferenceParams:
    base = r.cfg.preferences if r.cfg is not None else None
    alpha = r.number("alpha", ... if base is None else base.alpha)
    if getattr(r.args, "delta", None) is not None:
        return PreferenceParams.from_delta(alpha, r.number("delta"))
    return PreferenceParams(alpha, r.number("beta", ... if base is None else base.beta))


def _record(r: _Resolver, model: str):
    if r.cfg is None or r.cfg.model != model:
        found = None if r.cfg is None else r.cfg.model
        raise SchemaError(f"this command needs a {model!r} config, got {found!r}")
    return r.cfg.record


def _override(record, r: _Resolver, names):
    changes = {n: r.number(n, getattr(record, n)) for n in names}
    return dataclasses.replace(record, **changes)


def _growth(r: _Resolver) -> LogNormalGrowth:
    return _override(_record(r, "lognormal"), r, ("mean", "sigma"))


def _manifest(r: _Resolver) -> DatasetManifest | None:
    path = getattr(r.args, "data", None)
    if path is None:
        return None
    if not Path(path).is_file():
        raise UsageError(f"--data: no such file {path!r}")
    kind = getattr(r.args, "kind", None)
    if kind is None:
        raise UsageError("--kind is required with --data")
    r.used["data"] = path
    r.used["kind"] = kind
    return DatasetManifest(path=path, kind=kind, provenance=r.args.provenance)


def _targets(r: _Resolver) -> MomentTargets:
    manifest = _manifest(r)
    if manifest is not None:
        return calibration.sample_moments(load_series(manifest), manifest.kind)
    base = r.cfg.moments if r.cfg is not None else None
    return MomentTargets(
        mean_growth=r.number("mean_growth", ... if base is None else base.mean_growth),
        variance=r.number("variance", ... if base is None else base.variance),
        autocorr=r.number("autocorr", ... if base is None else base.autocorr),
    )


def _two_state_chain(r: _Resolver):
    params = _override(_record(r, "two_state"), r, ("mu", "gamma", "phi"))
    return params, params.chain()


# ---------------------------------------------------------------- subcommands


def cmd_hj_bound(r: _Resolver):
    growth = _growth(r)
    alpha = r.number("alpha", _default_alpha(r))
    res = lognormal.hj_bound(alpha, growth)
    return [Table("bound", ["alpha", "sigma", "approx", "exact", "relative_gap"],
                  [[alpha, growth.sigma, res.approx_ratio, res.exact_ratio, res.relative_gap]])]


def cmd_risk_free(r: _Resolver):
    growth = _growth(r)
    prefs = _prefs(r)
    jensen = r.flag("jensen")
    rf = lognormal.risk_free_rate(prefs, growth, jensen=jensen)
    return [Table("risk_free", ["alpha", "delta", "mean", "sigma", "rf"],
                  [[prefs.alpha, prefs.delta, growth.mean, growth.sigma, rf]])]


def cmd_implied_alpha(r: _Resolver):
    growth = _growth(r)
    sharpe = r.number("sharpe")
    corr = r.number("corr")
    res = lognormal.implied_risk_aversion(sharpe, growth, correlation=corr)
    return [Table("implied_alpha", ["sharpe", "sigma", "corr", "approx", "exact"],
                  [[sharpe, growth.sigma, corr, res.approx, res.exact]])]


def cmd_implied_delta(r: _Resolver):
    growth = _growth(r)
    rf = r.number("rf")
    alpha = r.number("alpha", _default_alpha(r))
    jensen = r.flag("jensen")
    delta = lognormal.implied_subjective_discount(rf, alpha, growth, jensen=jensen)
    return [Table("implied_delta", ["rf", "alpha", "mean", "sigma", "delta", "beta"],
                  [[rf, alpha, growth.mean, growth.sigma, delta, float(np.exp(-delta))]])]


def _state_rows(states, sol):
    return [
        [i, float(states[i]), float(sol.stationary[i]), float(sol.weights[i]),
         float(sol.conditional_equity[i]), float(sol.conditional_rf[i])]
        for i in range(len(states))
    ]


_STATE_COLUMNS = ["state", "growth", "pi", "w", "equity", "rf"]


def cmd_mp_solve(r: _Resolver):
    _, chain = _two_state_chain(r)
    prefs = _prefs(r)
    sol = markov.solve_equilibrium(chain, prefs)
    return [
        Table("summary", ["equity", "rf", "premium", "spectral_radius"],
              [[sol.unconditional_equity, sol.unconditional_rf, sol.premium, sol.spectral_radius]]),
        Table("states", _STATE_COLUMNS, _state_rows(chain.states, sol)),
    ]


def cmd_mp_simulate(r: _Resolver):
    _, chain = _two_state_chain(r)
    prefs = _prefs(r)
    horizon = r.integer("horizon")
    seed = r.integer("seed")
    sim = markov.simulate_economy(chain, prefs, horizon, seed)
    sol = markov.solve_equilibrium(chain, prefs)
    return [Table("simulation", ["quantity", "simulated", "se", "analytic"], [
        ["equity", sim.equity, sim.equity_se, sol.unconditional_equity],
        ["rf", sim.rf, sim.rf_se, sol.unconditional_rf],
        ["premium", sim.premium, sim.premium_se, sol.premium],
    ])], {"seed": seed}


def cmd_calibrate(r: _Resolver):
    targets = _targets(r)
    params = calibration.calibrate_two_state(targets)
    hi, lo = params.states
    return [Table("two_state", ["mean_growth", "variance", "autocorr", "mu", "gamma", "phi", "growth_high", "growth_low"],
                  [[targets.mean_growth, targets.variance, targets.autocorr,
                    params.mu, params.gamma, params.phi, hi, lo]])]


def cmd_max_premium(r: _Resolver):
    targets = _targets(r)
    res = calibration.max_premium_search(
        targets,
        alpha_range=tuple(r.numbers("alpha_range", 2)),
        beta_range=tuple(r.numbers("beta_range", 2)),
        rf_band=tuple(r.numbers("rf_band", 2)),
        n_alpha=r.integer("n_alpha"),
        n_beta=r.integer("n_beta"),
        shrink=r.number("shrink"),
    )
    return [Table("max_premium", ["premium", "premium_pct", "alpha", "beta", "rf", "feasible_points"],
                  [[res.premium, 100 * res.premium, res.alpha, res.beta, res.rf, res.n_feasible]])]


def _disaster_spec(r: _Resolver) -> disaster.DisasterSpec:
    return _override(_record(r, "disaster"), r, ("mu", "gamma", "psi", "phi", "eta"))


def cmd_rietz_build(r: _Resolver):
    spec = _disaster_spec(r)
    chain = disaster.build_rietz_chain(spec)
    pi = markov.stationary_distribution(chain)
    labels = ["good", "bad", "crash"][: chain.n]
    rows = [[labels[i], float(chain.states[i]), float(pi[i]), *map(float, chain.transition[i])] for i in range(chain.n)]
    return [Table("chain", ["state", "growth", "pi", *[f"to_{s}" for s in labels]], rows)]


def cmd_rietz_sweep(r: _Resolver):
    spec = _disaster_spec(r)
    prefs = _prefs(r)
    etas = r.numbers("etas")
    rows = disaster.premium_sweep(spec, etas, prefs)
    return [Table("sweep", ["eta", "premium", "rf", "equity"], [[x.eta, x.premium, x.rf, x.equity] for x in rows])]


def cmd_rietz_find(r: _Resolver):
    base = _record(r, "disaster")
    mu, gamma, phi = (r.number(n, getattr(base, n)) for n in ("mu", "gamma", "phi"))
    res = disaster.find_disaster_calibration(
        r.number("target"),
        rf_band=tuple(r.numbers("rf_band", 2)),
        alpha_cap=r.number("alpha_cap"),
        mu=mu,
        gamma=gamma,
        phi=phi,
        eta_range=(r.number("eta_min"), r.number("eta_max")),
        alpha_min=r.number("alpha_min"),
        psi_range=tuple(r.numbers("psi_range", 2)),
        beta_range=tuple(r.numbers("beta_range", 2)),
        points=r.integer("points"),
    )
    return [Table("calibration", ["eta", "alpha", "psi", "beta", "premium", "rf", "points_checked"],
                  [[res.spec.eta, res.prefs.alpha, res.spec.psi, res.prefs.beta, res.premium, res.rf,
                    res.points_checked]])]


def _habit(r: _Resolver) -> habit.HabitParams:
    return _override(_record(r, "habit"), r, ("alpha", "beta", "g", "sigma", "rho"))


def _surplus_grid(r: _Resolver, p: habit.HabitParams):
    points = r.integer("points")
    span = r.number("s_span")
    return np.linspace(p.s_bar - span, p.s_max, points)


def cmd_habit_rf(r: _Resolver):
    p = _habit(r)
    nodes = r.integer("nodes")
    grid = _surplus_grid(r, p)
    closed = habit.risk_free_const(p)
    quad = habit.risk_free_quadrature(grid, p, nodes)
    return [Table("risk_free", ["s", "rf_quadrature", "rf_closed_form", "abs_diff"],
                  [[float(s), float(q), closed, abs(float(q) - closed)] for s, q in zip(grid, quad)])]


def cmd_habit_sim(r: _Resolver):
    p = _habit(r)
    horizon = r.integer("horizon")
    burn_in = r.integer("burn_in")
    seed = r.integer("seed")
    path = habit.simulate_surplus(p, horizon, seed=seed, burn_in=burn_in)
    s = path.s_series
    return [Table("surplus", ["s_bar", "s_max", "mean_s", "std_s", "autocorr_s", "mean_S", "cap_hits"],
                  [[p.s_bar, p.s_max, float(s.mean()), float(s.std(ddof=1)), lag1_autocorr(s),
                    float(np.exp(s).mean()), path.cap_hits]])], {"seed": seed}


def cmd_habit_sharpe(r: _Resolver):
    p = _habit(r)
    if getattr(r.args, "s", None) is not None:
        grid = np.array(r.numbers("s"))
    else:
        grid = _surplus_grid(r, p)
    lam = np.atleast_1d(habit.sensitivity(grid, p))
    exact, approx = (np.atleast_1d(x) for x in habit.conditional_sharpe(grid, p))
    curv = np.atleast_1d(habit.local_curvature(np.exp(grid), p.alpha))
    rows = [[float(grid[i]), float(np.exp(grid[i])), float(lam[i]), float(exact[i]), float(approx[i]), float(curv[i])]
            for i in range(grid.shape[0])]
    return [Table("sharpe", ["s", "S", "lambda", "sharpe_exact", "sharpe_approx", "curvature"], rows)]


_LRR_FIELDS = [f.name for f in dataclasses.fields(lrr.LrrParams)]


def _lrr(r: _Resolver) -> lrr.LrrParams:
    return _override(_record(r, "lrr"), r, _LRR_FIELDS)


def cmd_lrr_solve(r: _Resolver):
    p = _lrr(r)
    cons = lrr.solve_consumption_claim(p)
    div = lrr.solve_dividend_claim(p, cons)
    cols = ["claim", "a0", "a1", "A0", "A1", "A2", "z_bar", "iterations"]
    rows = [[name, c.a0, c.a1, c.A0, c.A1, c.A2, c.z_bar, c.iterations] for name, c in (("consumption", cons), ("dividend", div))]
    return [Table("claims", cols, rows), Table("preferences", ["theta"], [[p.theta]])]


def cmd_lrr_sim(r: _Resolver):
    p = _lrr(r)
    horizon = r.integer("horizon")
    seed = r.integer("seed")
    claim = r.get("claim")
    res = lrr.premium_by_simulation(p, horizon, seed, claim=claim)
    return [Table("premium", ["claim", "premium", "se", "mean_rf", "sharpe_mean", "sharpe_std", "floor_rate"],
                  [[res.claim, res.premium, res.se, res.mean_rf, res.sharpe_mean, res.sharpe_std, res.floor_rate]])], \
        {"seed": seed}


def cmd_lrr_euler(r: _Resolver):
    p = _lrr(r)
    horizon = r.integer("horizon")
    seed = r.integer("seed")
    cons = lrr.solve_consumption_claim(p)
    div = lrr.solve_dividend_claim(p, cons)
    states = lrr.simulate_states(p, horizon, seed)
    m = lrr.sdf_path(p, states, cons)
    assets = [
        ("risk_free", lrr.risk_free_path(p, states, cons)),
        ("consumption_claim", lrr.claim_returns(cons, states, states.g_series)),
        ("dividend_claim", lrr.claim_returns(div, states, states.gd_series)),
    ]
    rows = []
    for name, ret in assets:
        e = lrr.euler_residual(m, ret)
        rows.append([name, e.mean, e.residual, e.se])
    return [Table("euler", ["asset", "mean_exp_m_plus_r", "residual", "se"], rows)], {"seed": seed}


def _hetero_prefs(r: _Resolver):
    base = _record(r, "preferences")
    alpha = r.number("alpha", base.alpha)
    delta = r.number("delta", base.delta)
    return alpha, delta


def cmd_hetero_b(r: _Resolver):
    alpha, delta = _hetero_prefs(r)
    m = getattr(r.args, "m", None)
    if m is not None:
        m = r.number("m")
        growth = r.number("growth", 1.0)
        b = hetero.general_b(m, growth, delta, alpha)
        return [Table("b", ["m", "growth", "delta", "alpha", "b"], [[m, growth, delta, alpha, float(b)]])]
    if getattr(r.args, "log_return", None) is not None:
        R = float(np.exp(r.number("log_return")))
    else:
        R = r.number("market_return")
    b = hetero.idiosyncratic_b(R, delta, alpha)
    return [Table("b", ["market_return", "log_return", "delta", "alpha", "b"],
                  [[R, float(np.log(R)), delta, alpha, float(b)]])]


def cmd_hetero_sim(r: _Resolver):
    alpha, delta = _hetero_prefs(r)
    n = r.integer("n_consumers")
    horizon = r.integer("horizon")
    seed = r.integer("seed")
    b = r.number("b")
    cs = hetero.simulate_cross_section(n, np.full(horizon, b), seed, delta=delta, alpha=alpha)
    g = cs.log_growth
    rows = [[t + 1, float(cs.b_series[t]), float(g[t].mean()), float(g[t].std()), float(np.exp(g[t]).mean())]
            for t in range(horizon)]
    return [Table("cross_section", ["t", "b", "mean_log_growth", "std_log_growth", "mean_gross_growth"], rows)], \
        {"seed": seed}


def market_returns(delta: float, return_sd: float, horizon: int, seed: int) -> np.ndarray:
    """Admissible gross market returns ``exp(delta - |x|)``, ``x ~ N(0, return_sd^2)``.

    Drawn from a stream independent of the cross-section's streams.
    """
    x = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2**31,))).normal(0.0, return_sd, horizon)
    return np.exp(delta - np.abs(x))


def cmd_hetero_euler(r: _Resolver):
    alpha, delta = _hetero_prefs(r)
    n = r.integer("n_consumers")
    horizon = r.integer("horizon")
    seed = r.integer("seed")
    R = market_returns(delta, r.number("return_sd"), horizon, seed)
    b = hetero.idiosyncratic_b(R, delta, alpha)
    cs = hetero.simulate_cross_section(n, b, seed, delta=delta, alpha=alpha)
    rf = 1.0 / np.mean(1.0 / R)
    res = hetero.aggregated_euler_residual(cs, R - rf, alpha)
    return [Table("aggregated_euler",
                  ["n_consumers", "mean_finite_n", "mean_lognormal", "mean_abs_gap", "max_abs_gap", "min_multiplier"],
                  [[n, res.mean_finite_n, res.mean_lognormal, res.mean_abs_gap, res.max_abs_gap,
                    float(res.multiplier.min())]])], {"seed": seed}


def cmd_moments(r: _Resolver):
    manifest = _manifest(r)
    if manifest is None:
        raise UsageError("--data is required")
    series = load_series(manifest)
    m = calibration.sample_moments(series, manifest.kind)
    return [Table("moments", ["observations", "mean_growth", "variance", "std", "autocorr"],
                  [[len(series), m.mean_growth, m.variance, m.std, m.autocorr]])]


# ---------------------------------------------------------------- parser

_NUM = dict(type=str, default=None)


def _num(p, *names, help=None):
    for name in names:
        p.add_argument(f"--{name}", dest=name.replace("-", "_"), help=help, **_NUM)


@dataclass(frozen=True)
class _Command:
    run: Callable
    config: str | None
    help: str
    options: tuple


_LOGNORMAL = ("mean", "sigma")
_PREFS = ("alpha", "beta", "delta")

COMMANDS: dict[str, _Command] = {
    "hj-bound": _Command(cmd_hj_bound, "lognormal", "Hansen-Jagannathan bound under lognormal growth",
                         ("alpha",) + _LOGNORMAL),
    "risk-free": _Command(cmd_risk_free, "lognormal", "CRRA risk-free rate under lognormal growth",
                          _PREFS + _LOGNORMAL + ("jensen",)),
    "implied-alpha": _Command(cmd_implied_alpha, "lognormal", "risk aversion implied by a Sharpe ratio",
                              ("sharpe", "corr") + _LOGNORMAL),
    "implied-delta": _Command(cmd_implied_delta, "lognormal", "discount rate implied by a risk-free rate",
                              ("rf", "alpha", "jensen") + _LOGNORMAL),
    "mp-solve": _Command(cmd_mp_solve, "mp-1889-1978", "equilibrium prices of a two-state economy",
                         _PREFS + ("mu", "gamma", "phi")),
    "mp-simulate": _Command(cmd_mp_simulate, "mp-1889-1978", "simulated returns of a two-state economy",
                            _PREFS + ("mu", "gamma", "phi", "horizon")),
    "calibrate": _Command(cmd_calibrate, "mp-1889-1978", "two-state chain matching growth moments",
                          ("mean-growth", "variance", "autocorr")),
    "max-premium": _Command(cmd_max_premium, "mp-1889-1978", "largest premium over an (alpha, beta) grid",
                            ("mean-growth", "variance", "autocorr", "alpha-range", "beta-range", "rf-band",
                             "n-alpha", "n-beta", "shrink")),
    "rietz-build": _Command(cmd_rietz_build, "rietz", "crash-augmented chain",
                            ("mu", "gamma", "psi", "phi", "eta")),
    "rietz-sweep": _Command(cmd_rietz_sweep, "rietz", "premium across crash probabilities",
                            ("mu", "gamma", "psi", "phi", "etas") + _PREFS),
    "rietz-find": _Command(cmd_rietz_find, "rietz", "search for a crash calibration hitting a target premium",
                           ("mu", "gamma", "phi", "target", "rf-band", "alpha-cap", "alpha-min", "eta-min",
                            "eta-max", "psi-range", "beta-range", "points")),
    "habit-rf": _Command(cmd_habit_rf, "cc-1999-annual", "habit risk-free rate: quadrature vs closed form",
                         ("alpha", "beta", "g", "sigma", "rho", "points", "s-span", "nodes")),
    "habit-sim": _Command(cmd_habit_sim, "cc-1999-annual", "simulate the log surplus ratio",
                          ("alpha", "beta", "g", "sigma", "rho", "horizon", "burn-in")),
    "habit-sharpe": _Command(cmd_habit_sharpe, "cc-1999-annual", "conditional Sharpe bound across surplus states",
                             ("alpha", "beta", "g", "sigma", "rho", "s", "points", "s-span")),
    "lrr-solve": _Command(cmd_lrr_solve, "by-2004-monthly-like", "log-linear valuation coefficients",
                          tuple(f.replace("_", "-") for f in _LRR_FIELDS)),
    "lrr-sim": _Command(cmd_lrr_sim, "by-2004-monthly-like", "simulated equity premium",
                        tuple(f.replace("_", "-") for f in _LRR_FIELDS) + ("horizon", "claim")),
    "lrr-euler": _Command(cmd_lrr_euler, "by-2004-monthly-like", "Euler-equation residuals on a simulated path",
                          tuple(f.replace("_", "-") for f in _LRR_FIELDS) + ("horizon",)),
    "hetero-b": _Command(cmd_hetero_b, "hetero", "cross-sectional dispersion pricing a market return",
                         ("alpha", "delta", "market-return", "log-return", "m", "growth")),
    "hetero-sim": _Command(cmd_hetero_sim, "hetero", "simulate idiosyncratic consumption growth",
                           ("alpha", "delta", "n-consumers", "b", "horizon")),
    "hetero-euler": _Command(cmd_hetero_euler, "hetero", "finite-N vs lognormal-aggregated Euler errors",
                             ("alpha", "delta", "n-consumers", "horizon", "return-sd")),
    "moments": _Command(cmd_moments, None, "sample moments of a growth series", ()),
}

_CHOICES = {"jensen": ("on", "off"), "claim": ("dividend", "consumption")}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="premia", description="Consumption-based asset pricing models.")
    sub = parser.add_subparsers(dest="command", metavar="subcommand")
    sub.required = True
    for name, command in COMMANDS.items():
        p = sub.add_parser(name, help=command.help, description=command.help)
        p.add_argument("--config", default=None, help=f"config name or path (default: {command.config})")
        p.add_argument("--data", default=None, help="CSV series with columns period,value")
        p.add_argument("--kind", default=None, choices=calibration.GROWTH_KINDS, help="how --data is measured")
        p.add_argument("--provenance", default="supplied on the command line", help="note recorded with --data")
        p.add_argument("--seed", default=None, help="random seed for simulations")
        p.add_argument("--out", default=None, help="write the main table as CSV")
        for opt in command.options:
            dest = opt.replace("-", "_")
            if dest in _CHOICES:
                p.add_argument(f"--{opt}", dest=dest, default=None, choices=_CHOICES[dest])
            else:
                _num(p, opt)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    command = COMMANDS[args.command]
    prog = f"premia {args.command}"
    start = time.perf_counter()
    try:
        config_name = args.config or command.config
        cfg = load_config(config_name) if config_name is not None else None
        resolver = _Resolver(args, cfg)
        result = command.run(resolver)
        tables, seeds = (result if isinstance(result, tuple) else (result, {}))
    except UsageError as exc:
        print(f"{prog}: error: {exc}", file=stderr)
        return 2
    except PremiaError as exc:
        print(f"{prog}: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    elapsed = time.perf_counter() - start

    params = {k: v for k, v in resolver.used.items() if k != "seed"}
    report = RunReport(args.command, cfg.name if cfg is not None else None, params, tables, seeds, elapsed)
    stdout.write(report.render())
    if args.out is not None:
        write_table_csv(args.out, tables[0].columns, tables[0].rows)
    print(f"{prog}: wall time {elapsed:.3f} s", file=stderr)
    return 0


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
