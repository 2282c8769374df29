"""``vantrees-lab``: batch experiments writing CSV, JSON and SVG.

Usage::

    vantrees-lab <fig1|fig2|scaling|zq-single|adaptive-single> [--config FILE]
                 [--seed N] [--out DIR] [--alpha X] [--sigma X] [--n K]

The config file is INI-style (``key = value`` under any section headers);
numeric values may use ``pi``, e.g. ``sigma = pi/4``. Any CSV/JSON/SVG file
written by a previous run is also accepted as ``--config`` and reproduces
that run. Exit codes: 0 success, 2 config or output error, 3 when a
Monte-Carlo search did not converge in the enlarged dimension.
"""
from __future__ import annotations

import argparse
import ast
import configparser
import dataclasses
import json
import logging
import math
import operator
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from .adaptive import (
    calibrate_alpha,
    run_fisher_adaptive,
    run_fixed_povm,
    run_vantrees_adaptive,
)
from .hilbert import CoherentModel
from .infotheory import generalized_qfi_vq, zq_restricted_analytic
from .optimizer import optimize_montecarlo, optimize_restricted
from .priors import flat_prior, gaussian_prior
from .svgplot import line_plot

logger = logging.getLogger("vantrees")

EXPERIMENTS = ("fig1", "fig2", "scaling", "zq-single", "adaptive-single")
SCHEMES = ("fisher", "vantrees", "fixed-fisher", "fixed-vantrees")
FIG2_MAX_N = 12
MARKER = "vantrees-config:"
EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 2, 3

class ConfigError(ValueError):
    pass

@dataclass
class ExperimentConfig:
    experiment: str = "fig1"
    alpha: float = 1.0
    alpha_min: float = 0.0
    alpha_max: float = 1.0
    alpha_step: float = 0.1
    calibrate: bool = False
    sigma: float = math.pi / 4
    grid: int = 2048
    budget: int = 2000
    seed: int = 0
    n: int = 8
    theta_r: int = 512
    first_guess: str = "zero"
    averaging: str = "process"
    scheme: str = "vantrees"
    exclude_flagged: bool = False
    allow_large_n: bool = False
    out: str = "results"
    formats: str = "csv,json,svg"

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.alpha_step <= 0 or self.alpha_max < self.alpha_min:
            raise ConfigError("alpha range is empty")
        if self.sigma <= 0:
            raise ConfigError("sigma must be positive")
        if self.grid < 16 or self.theta_r < 2:
            raise ConfigError("grid sizes too small")
        if self.budget < 1 or self.n < 1:
            raise ConfigError("budget and n must be >= 1")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
        if self.averaging not in ("process", "branchwise"):
            raise ConfigError("averaging must be 'process' or 'branchwise'")
        if self.first_guess not in ("zero", "random"):
            try:
                float(self.first_guess)
            except ValueError:
                raise ConfigError("first_guess must be 'zero', 'random' or an angle") from None
        unknown = set(self.format_list()) - {"csv", "json", "svg"}
        if unknown:
            raise ConfigError(f"unknown output formats {sorted(unknown)}")
        return self

    def format_list(self):
        return [f.strip() for f in self.formats.split(",") if f.strip()]

    def alphas(self):
        count = int(math.floor((self.alpha_max - self.alpha_min) / self.alpha_step + 1e-9)) + 1
        return [round(self.alpha_min + i * self.alpha_step, 12) for i in range(count)]

    def as_dict(self):
        return dataclasses.asdict(self)

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow, ast.USub: operator.neg,
        ast.UAdd: operator.pos}

def _number(text: str) -> float:
    """Evaluate a numeric literal possibly involving ``pi``."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ConfigError(f"not a number: {text!r}")
    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except SyntaxError:
        raise ConfigError(f"not a number: {text!r}") from None

def _coerce(name: str, raw):
    field_type = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}.get(name)
    if field_type is None:
        raise ConfigError(f"unknown config key {name!r}")
    if isinstance(raw, str):
        if field_type == "float":
            return _number(raw)
        if field_type == "int":
            value = _number(raw)
            if value != int(value):
                raise ConfigError(f"{name} must be an integer")
            return int(value)
        if field_type == "bool":
            if raw.strip().lower() in ("1", "true", "yes", "on"):
                return True
            if raw.strip().lower() in ("0", "false", "no", "off"):
                return False
            raise ConfigError(f"{name} must be a boolean")
        return raw.strip()
    return raw

def _read_config_file(path: Path) -> dict:
    text = path.read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError:
        payload = None
    if isinstance(payload, dict) and isinstance(payload.get("config"), dict):
        return payload["config"]
    m = re.search(re.escape(MARKER) + r"\s*(\{.*\})", text)
    if m:
        return json.loads(m.group(1))
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text if text.lstrip().startswith("[") else "[main]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    values = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            values[key.replace("-", "_")] = value
    return values

def load_config(path=None, overrides=None) -> ExperimentConfig:
    values = {}
    if path is not None:
        try:
            values.update(_read_config_file(Path(path)))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    kwargs = {k: _coerce(k, v) for k, v in values.items()}
    return ExperimentConfig(**kwargs).validate()

def _fmt(x) -> str:
    return "%.17g" % float(x)

class _Writer:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.out = Path(cfg.out)
        self.formats = cfg.format_list()
        self.meta = json.dumps(cfg.as_dict(), sort_keys=True)
        self.written = []

    def prepare(self):
        self.out.mkdir(parents=True, exist_ok=True)

    def _write(self, name, text):
        path = self.out / name
        path.write_text(text, encoding="utf-8")
        self.written.append(path)

    def csv(self, name, columns, rows):
        if "csv" not in self.formats:
            return
        lines = [f"# vantrees-lab {self.cfg.experiment}", f"# {MARKER} {self.meta}",
                 "# columns: " + ",".join(columns), ",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        self._write(name, "\n".join(lines) + "\n")

    def json(self, name, payload):
        if "json" not in self.formats:
            return
        body = {"config": self.cfg.as_dict(), **payload}
        self._write(name, json.dumps(body, indent=2, sort_keys=True, allow_nan=True) + "\n")

    def svg(self, name, *args, **kwargs):
        if "svg" not in self.formats:
            return
        self._write(name, line_plot(*args, metadata=f"{MARKER} {self.meta}", **kwargs))

def cmd_fig1(cfg: ExperimentConfig, w: _Writer) -> bool:
    """Analytic and Monte-Carlo Z_Q with V_Q against |alpha| for a Gaussian prior."""
    prior = gaussian_prior(cfg.sigma, cfg.grid)
    rows, reports, ok = [], [], True
    for a in cfg.alphas():
        model = CoherentModel(a)
        mc = optimize_montecarlo(model, prior, budget=cfg.budget, seed=cfg.seed)
        res = optimize_restricted(model, prior)
        ok &= mc.converged
        rows.append((a, zq_restricted_analytic(model, cfg.sigma), mc.best_value,
                     generalized_qfi_vq(model, prior), res.best_value, float(mc.converged)))
        reports.append({"alpha": a, "montecarlo": mc.to_dict(), "restricted": res.to_dict()})
        logger.info("alpha=%g zq=%.6g", a, mc.best_value)
    cols = ["alpha", "zq_analytic", "zq_numeric", "vq", "zq_restricted", "converged"]
    w.csv("fig1.csv", cols, rows)
    w.json("fig1.json", {"rows": [dict(zip(cols, r)) for r in rows], "runs": reports})
    xs = [r[0] for r in rows]
    w.svg("fig1.svg", [
        ("analytic Z_Q", xs, [r[1] for r in rows], "line"),
        ("numeric Z_Q", xs, [r[2] for r in rows], "dots"),
        ("V_Q", xs, [r[3] for r in rows], "dashed"),
    ], title=f"Van Trees information, sigma={cfg.sigma:.4g}", xlabel="|alpha|",
        ylabel="information")
    return ok

def cmd_fig2(cfg: ExperimentConfig, w: _Writer) -> bool:
    """Fisher-adaptive against Van-Trees-adaptive mean errors, flat prior."""
    model = CoherentModel(cfg.alpha)
    fisher = run_fisher_adaptive(model, cfg.n, cfg.theta_r, cfg.first_guess, cfg.seed,
                                 ml_grid=cfg.grid, exclude_flagged=cfg.exclude_flagged)
    vt = run_vantrees_adaptive(model, cfg.n, flat_prior(cfg.grid), averaging=cfg.averaging)
    other = "branchwise_curve" if cfg.averaging == "process" else "process_curve"
    rows = [(k, ef, ev, eo) for (k, ef), (_, ev), (_, eo)
            in zip(fisher.error_curve, vt.error_curve, vt.tree_stats[other])]
    cols = ["n", "err_fisher", "err_vantrees", "err_vantrees_" + other.split("_")[0]]
    w.csv("fig2.csv", cols, rows)
    w.json("fig2.json", {"fisher": fisher.to_dict(), "vantrees": vt.to_dict()})
    ks = [r[0] for r in rows]
    w.svg("fig2.svg", [
        ("Fisher-adaptive", ks, [r[1] for r in rows], "dots"),
        ("Van-Trees-adaptive", ks, [r[2] for r in rows], "crosses"),
    ], title=f"Adaptive mean error, |alpha|={cfg.alpha:.4g}", xlabel="n",
        ylabel="mean error (rad^2)", logy=True)
    return True

def cmd_scaling(cfg: ExperimentConfig, w: _Writer) -> bool:
    """Same measurement on every copy: n * error for both choices of POVM."""
    alpha = calibrate_alpha(0.8) if cfg.calibrate else cfg.alpha
    model = CoherentModel(alpha)
    fisher = run_fixed_povm(model, cfg.n, "fisher", cfg.theta_r, cfg.first_guess, cfg.seed,
                            exclude_flagged=cfg.exclude_flagged)
    vt = run_fixed_povm(model, cfg.n, "vantrees", m=cfg.grid)
    # the theta_r-average of 1/F diverges at theta_r = eps + pi; report the
    # value with the flagged points dropped as a diagnostic
    trimmed = run_fixed_povm(model, cfg.n, "fisher", cfg.theta_r, cfg.first_guess, cfg.seed,
                             exclude_flagged=True)
    rows = [(k, k * ef, k * ev) for (k, ef), (_, ev) in zip(fisher.error_curve, vt.error_curve)]
    w.csv("scaling.csv", ["n", "n_err_fisher", "n_err_vantrees"], rows)
    cf, cv = fisher.fitted_constant, vt.fitted_constant
    w.json("scaling.json", {
        "alpha": alpha,
        "c_fisher": cf,
        "c_vantrees": cv,
        "ratio": cf / cv,
        "c_fisher_excluding_flagged": trimmed.fitted_constant,
        "fisher": fisher.to_dict(),
        "vantrees": vt.to_dict(),
    })
    ks = [r[0] for r in rows]
    w.svg("scaling.svg", [
        ("n * err Fisher", ks, [r[1] for r in rows], "dots"),
        ("n * err Van Trees", ks, [r[2] for r in rows], "crosses"),
    ], title=f"Fixed measurement, |alpha|={alpha:.4g}", xlabel="n", ylabel="n * error",
        logy=True)
    return True

def cmd_zq_single(cfg: ExperimentConfig, w: _Writer) -> bool:
    """All Z_Q estimates for one |alpha| and sigma."""
    prior = gaussian_prior(cfg.sigma, cfg.grid)
    model = CoherentModel(cfg.alpha)
    mc = optimize_montecarlo(model, prior, budget=cfg.budget, seed=cfg.seed)
    res = optimize_restricted(model, prior)
    w.json("zq_single.json", {
        "zq_analytic": zq_restricted_analytic(model, cfg.sigma),
        "zq_restricted": res.best_value,
        "zq_numeric": mc.best_value,
        "vq": generalized_qfi_vq(model, prior),
        "restricted": res.to_dict(),
        "montecarlo": mc.to_dict(),
    })
    w.csv("zq_single.csv", ["alpha", "sigma", "zq_analytic", "zq_restricted", "zq_numeric", "vq"],
          [(cfg.alpha, cfg.sigma, zq_restricted_analytic(model, cfg.sigma), res.best_value,
            mc.best_value, generalized_qfi_vq(model, prior))])
    return mc.converged

def cmd_adaptive_single(cfg: ExperimentConfig, w: _Writer) -> bool:
    """One adaptive or fixed schedule, selected by ``scheme``."""
    model = CoherentModel(cfg.alpha)
    if cfg.scheme == "fisher":
        rep = run_fisher_adaptive(model, cfg.n, cfg.theta_r, cfg.first_guess, cfg.seed,
                                  ml_grid=cfg.grid, exclude_flagged=cfg.exclude_flagged)
    elif cfg.scheme == "vantrees":
        rep = run_vantrees_adaptive(model, cfg.n, flat_prior(cfg.grid), averaging=cfg.averaging)
    elif cfg.scheme == "fixed-fisher":
        rep = run_fixed_povm(model, cfg.n, "fisher", cfg.theta_r, cfg.first_guess, cfg.seed,
                             exclude_flagged=cfg.exclude_flagged)
    else:
        rep = run_fixed_povm(model, cfg.n, "vantrees", m=cfg.grid)
    w.csv(f"adaptive_{cfg.scheme}.csv", ["step", "error"], rep.error_curve)
    w.json(f"adaptive_{cfg.scheme}.json", {"report": rep.to_dict()})
    return True

COMMANDS = {
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
    "scaling": cmd_scaling,
    "zq-single": cmd_zq_single,
    "adaptive-single": cmd_adaptive_single,
}

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vantrees-lab", description=__doc__.splitlines()[0])
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="INI config, or an output file of a previous run")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--alpha", type=float, help="|alpha|; for fig1 collapses the range to one point")
    p.add_argument("--sigma", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--allow-large-n", action="store_true", default=None,
                   help=f"let fig2 enumerate trees deeper than {FIG2_MAX_N}")
    p.add_argument("-v", "--verbose", action="store_true")
    return p

def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = {"experiment": args.experiment, "seed": args.seed, "out": args.out,
                 "alpha": args.alpha, "sigma": args.sigma, "n": args.n,
                 "allow_large_n": args.allow_large_n}
    if args.alpha is not None:
        overrides.update(alpha_min=args.alpha, alpha_max=args.alpha)
    try:
        cfg = load_config(args.config, overrides)
        if cfg.experiment == "fig2" and cfg.n > FIG2_MAX_N and not cfg.allow_large_n:
            raise ConfigError(f"fig2 with n={cfg.n} > {FIG2_MAX_N} needs --allow-large-n")
        writer = _Writer(cfg)
        writer.prepare()
    except ConfigError as exc:
        print(f"vantrees-lab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"vantrees-lab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        ok = COMMANDS[cfg.experiment](cfg, writer)
    except OSError as exc:
        print(f"vantrees-lab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"vantrees-lab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in writer.written:
        print(path)
    if not ok:
        print("vantrees-lab: Monte-Carlo search did not converge in the enlarged dimension",
              file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK

if __name__ == "__main__":
    sys.exit(main())
