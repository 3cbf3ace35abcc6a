"""``varwave`` command-line front end.

Exit codes: 0 success, 1 a hypothesis check failed, 2 numerical failure,
3 configuration error.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from ._validation import ConvergenceError, HypothesisError, ResonanceError, SymmetryError
from .config import ConfigError, load_config
from .function_space import SpectralField, SpectralSpace, project_parity, synthesize
from .io import dumps_json, grid_to_csv, read_json, write_csv, write_json
from .solver import apriori_bound, continuation_solve, uniqueness_probe, _resolve_radius
from .sturm_liouville import solve_eigenbasis
from .verification import (
    check_global_slopes,
    check_nonresonance,
    estimate_delta,
    spectral_residual,
    weak_residual,
)
from .wave_spectrum import consecutive_pair, kernel_basis, odd_spectrum

EXIT_OK, EXIT_HYPOTHESIS, EXIT_NUMERICAL, EXIT_CONFIG = 0, 1, 2, 3

SUBCOMMANDS = ("spectrum", "gaps", "check", "solve", "verify", "probe-uniqueness")


def build_parser():
    parser = argparse.ArgumentParser(prog="varwave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", type=Path)
        p.add_argument("--nmax", type=int)
        p.add_argument("--mmax", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--format", choices=("csv", "json"))
        if name == "solve":
            p.add_argument("--force", action="store_true", help="solve even when the nonresonance check fails")
            p.add_argument("--grid-out", type=Path, help="also write the solution on the time-space grid as CSV")
        if name == "verify":
            p.add_argument("--solution", required=True, type=Path)
        if name == "probe-uniqueness":
            p.add_argument("--starts", type=int, default=20)
    return parser


class _Context:
    """Objects shared by the subcommands, built lazily from the config."""

    def __init__(self, cfg, args):
        self.cfg = cfg
        self.args = args
        self.m_max, self.n_max = cfg.truncation(args.mmax, args.nmax)

    def out_format(self, default):
        fmt = self.args.format or self.cfg.get("output", "format", default)
        if fmt not in ("csv", "json"):
            raise ConfigError(f"[output] format must be csv or json, got {fmt!r}")
        return fmt

    def out_path(self):
        if self.args.out is not None:
            return self.args.out
        path = self.cfg.get("output", "path")
        return Path(path) if path else None

    def basis(self):
        if not hasattr(self, "_basis"):
            self._basis = solve_eigenbasis(self.cfg.profile(), self.n_max)
        return self._basis

    def period(self):
        return self.cfg.period(require_even=True)

    def space(self):
        if not hasattr(self, "_space"):
            self._space = SpectralSpace(self.m_max, self.n_max).fit(self.basis(), self.period())
        return self._space

    def spectrum(self):
        return odd_spectrum(self.basis(), self.period(), self.m_max, self.n_max, self.cfg.kernel_tol)

    def solve_config(self):
        return self.cfg.solve_config(self.m_max, self.n_max, seed=self.args.seed)


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _summary(obj):
    print(dumps_json(obj))


def cmd_spectrum(ctx):
    basis = ctx.basis()
    n = np.arange(1, basis.n_max + 1)
    defect = basis.lambda_sq - n**2 - basis.profile.kappa() / np.pi
    rows = [(int(k), float(l), float(d)) for k, l, d in zip(n, basis.lambda_sq, defect)]
    out = ctx.out_path()
    if ctx.out_format("csv") == "csv":
        text = write_csv(["n", "lambda_sq", "defect"], rows)
    else:
        text = write_json({"rows": [dict(zip(("n", "lambda_sq", "defect"), r)) for r in rows]})
    if out is not None:
        _emit(text, out)
        _summary({"n_max": basis.n_max, "kappa": basis.profile.kappa(), "max_abs_defect": float(np.abs(defect).max())})
    else:
        _emit(text, None)
    return EXIT_OK


def cmd_gaps(ctx):
    spec = ctx.spectrum()
    level = float(ctx.cfg.get("spectrum", "level", 0.0))
    lower, upper = consecutive_pair(spec, level)
    summary = {
        "level": level,
        "lambda_lower": lower,
        "lambda_upper": upper,
        "kernel_indices": {"lower": kernel_basis(spec, lower), "upper": kernel_basis(spec, upper)},
        "min_abs_mu": spec.min_abs_mu,
        "argmin_abs_mu": list(spec.argmin_abs_mu),
    }
    rows = [(int(m), int(n), float(v), "odd") for m, n, v in zip(spec.m, spec.n, spec.mu)]
    out = ctx.out_path()
    if ctx.out_format("csv") == "csv":
        if out is not None:
            write_csv(["m", "n", "mu", "parity"], rows, out)
            write_json(summary, out.with_name(out.name + ".summary.json"))
    else:
        if out is not None:
            entries = [dict(zip(("m", "n", "mu", "parity"), r)) for r in rows]
            write_json({"summary": summary, "entries": entries}, out)
    _summary(summary)
    return EXIT_OK


def _nonresonance(ctx):
    scfg = ctx.solve_config()
    weighted = bool(ctx.cfg.get("solver", "weighted_gram", False))
    report = check_nonresonance(scfg.alpha, scfg.beta, ctx.spectrum(), ctx.space(), weighted=weighted)
    return scfg, report


def cmd_check(ctx):
    scfg, report = _nonresonance(ctx)
    result = report.to_dict()
    result["delta_alpha"] = estimate_delta(scfg.alpha, ctx.space(), scfg.kernel_tol)
    result["delta_beta"] = estimate_delta(scfg.beta, ctx.space(), scfg.kernel_tol)
    write_json(result, ctx.out_path())
    _summary({"verdict": report.verdict, "lambda_lower": report.lambda_lower, "lambda_upper": report.lambda_upper})
    return EXIT_OK if report.verdict else EXIT_HYPOTHESIS


def cmd_solve(ctx):
    scfg, check = _nonresonance(ctx)
    if not check.verdict and not ctx.args.force:
        print(f"nonresonance check failed ({dumps_json(check.to_dict())}); rerun with --force to solve anyway",
              file=sys.stderr)
        return EXIT_HYPOTHESIS
    space = ctx.space()
    spec = ctx.cfg.nonlinearity(space)
    report = continuation_solve(spec, scfg, space)
    result = report.to_dict()
    result["check"] = check.to_dict()
    result["even_part_norm"] = project_parity(report.solution, "even").norm()
    write_json(result, ctx.out_path())
    if ctx.args.grid_out is not None:
        grid_to_csv(synthesize(report.solution), ctx.args.grid_out)
    _summary({
        "residual_norm": report.residual_norm,
        "solution_norm": report.solution.norm(),
        "apriori_bound": report.apriori_bound,
        "bound_satisfied": report.bound_satisfied,
    })
    return EXIT_OK


def cmd_verify(ctx):
    space = ctx.space()
    path = ctx.args.solution
    if not path.is_file():
        raise ConfigError(f"solution file not found: {path}")
    data = read_json(path)
    data = data.get("solution", data)
    try:
        y = SpectralField.from_dict(data, space)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid solution file {path}: {exc}") from exc
    spec = ctx.cfg.nonlinearity(space)
    scfg = ctx.solve_config()
    bound, delta, h_norm = apriori_bound(spec, scfg, space, _resolve_radius(spec, scfg, space))
    result = {
        "spectral_residual": spectral_residual(y, spec),
        "weak_residual": weak_residual(y, spec, seed=scfg.seed),
        "solution_norm": y.norm(),
        "even_part_norm": project_parity(y, "even").norm(),
        "apriori_bound": bound,
        "bound_satisfied": bool(y.norm() <= bound),
        "delta_num": delta,
        "h_R_norm": h_norm,
    }
    write_json(result, ctx.out_path())
    _summary({k: result[k] for k in ("spectral_residual", "weak_residual", "bound_satisfied")})
    return EXIT_OK


def cmd_probe(ctx):
    space = ctx.space()
    spec = ctx.cfg.nonlinearity(space)
    scfg = ctx.solve_config()
    report = uniqueness_probe(spec, scfg, space, num_starts=ctx.args.starts)
    result = report.to_dict()
    result["slopes"] = check_global_slopes(spec, scfg.alpha, scfg.beta).to_dict()
    write_json(result, ctx.out_path())
    _summary({k: result[k] for k in ("n_starts", "n_distinct", "all_converged", "max_pairwise_distance")})
    return EXIT_OK if report.n_distinct <= 1 else EXIT_HYPOTHESIS


COMMANDS = {
    "spectrum": cmd_spectrum,
    "gaps": cmd_gaps,
    "check": cmd_check,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "probe-uniqueness": cmd_probe,
}


def run(argv=None):
    """Parse ``argv``, dispatch, and return the exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; report it as a configuration error
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        ctx = _Context(load_config(args.config), args)
        return COMMANDS[args.command](ctx)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisError as exc:
        print(f"hypothesis not met: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ConvergenceError, ResonanceError, SymmetryError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
