"""Run configuration: an INI-style file with ``key = value`` under ``[section]`` headers.

Values are parsed as JSON when possible (numbers, booleans, lists), otherwise
kept as strings. Example::

    [coefficient]
    kind = exponential
    a = 2.0

    [period]
    p = 2
    q = 1

    [spectrum]
    m_max = 15
    n_max = 10

    [nonlinearity]
    c_lin = -0.25
    c_sat = 0.125
    forcing = [["cos", 1, 1, 0.5]]

    [solver]
    alpha = -1.15
    beta = 0.65
"""

import configparser
import json
from dataclasses import dataclass, field
from pathlib import Path

from .coefficient import CoefficientProfile
from .function_space import NonlinearitySpec, mode_field
from .solver import SolveConfig
from .wave_spectrum import DEFAULT_KERNEL_TOL, RationalPeriod

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    """Malformed, incomplete or inconsistent configuration."""


def _value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text.strip()


@dataclass
class RunConfig:
    sections: dict
    base_dir: Path = field(default_factory=Path.cwd)

    def section(self, name, required=True):
        if name not in self.sections:
            if required:
                raise ConfigError(f"config is missing the [{name}] section")
            return {}
        return self.sections[name]

    def get(self, section, key, default=None, required=False):
        sec = self.section(section, required=required)
        if key not in sec:
            if required:
                raise ConfigError(f"[{section}] is missing '{key}'")
            return default
        return sec[key]

    def profile(self):
        sec = self.section("coefficient")
        kind = sec.get("kind")
        grid_size = sec.get("grid_size", 513)
        try:
            if kind == "constant":
                return CoefficientProfile.constant(sec.get("c", 1.0), grid_size=grid_size)
            if kind == "exponential":
                if "a" not in sec:
                    raise ConfigError("[coefficient] kind=exponential needs 'a'")
                return CoefficientProfile.exponential(sec["a"], grid_size=grid_size)
            if kind == "square_polynomial":
                return CoefficientProfile.square_polynomial(grid_size=grid_size)
            if kind == "user_sampled":
                table = sec.get("table")
                if table is None:
                    raise ConfigError("[coefficient] kind=user_sampled needs 'table'")
                path = Path(table)
                if not path.is_absolute():
                    path = self.base_dir / path
                if not path.exists():
                    raise ConfigError(f"coefficient table not found: {path}")
                return CoefficientProfile.from_table(path, grid_size=sec.get("grid_size"))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid [coefficient] section: {exc}") from exc
        raise ConfigError(f"unknown coefficient kind {kind!r}")

    def period(self, require_even=False):
        try:
            period = RationalPeriod(self.get("period", "p", required=True), self.get("period", "q", required=True))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid [period] section: {exc}") from exc
        if require_even and period.p % 2:
            raise ConfigError(f"this subcommand works on the odd subspace and needs p even (got p={period.p})")
        return period

    def truncation(self, m_max=None, n_max=None):
        m = m_max if m_max is not None else self.get("spectrum", "m_max", 15)
        n = n_max if n_max is not None else self.get("spectrum", "n_max", 10)
        for name, v in (("m_max", m), ("n_max", n)):
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"[spectrum] {name} must be a positive integer, got {v!r}")
        return m, n

    @property
    def kernel_tol(self):
        return float(self.get("spectrum", "kernel_tol", DEFAULT_KERNEL_TOL))

    def nonlinearity(self, space):
        sec = self.section("nonlinearity")
        modes = sec.get("forcing", [])
        try:
            forcing = mode_field(space, [tuple(m) for m in modes]) if modes else None
            return NonlinearitySpec(
                c_lin=sec.get("c_lin", 0.0),
                c_sat=sec.get("c_sat", 0.0),
                c_osc=sec.get("c_osc", 0.0),
                forcing=forcing,
                symmetry=sec.get("symmetry", "split_f1_f2" if modes else "odd_f1_only"),
            )
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError(f"invalid [nonlinearity] section: {exc}") from exc

    def solve_config(self, m_max, n_max, seed=None):
        sec = self.section("solver")
        for key in ("alpha", "beta"):
            if key not in sec:
                raise ConfigError(f"[solver] is missing '{key}'")
            if not isinstance(sec[key], (int, float)) or isinstance(sec[key], bool):
                raise ConfigError(f"[solver] {key} must be a number in the config file")
        try:
            return SolveConfig(
                m_max=m_max,
                n_max=n_max,
                alpha=float(sec["alpha"]),
                beta=float(sec["beta"]),
                continuation_steps=sec.get("continuation_steps", 10),
                newton_tol=sec.get("newton_tol", 1e-10),
                newton_max_iter=sec.get("newton_max_iter", 30),
                R_clamp=sec.get("R_clamp"),
                seed=seed if seed is not None else sec.get("seed", 0),
                kernel_tol=self.kernel_tol,
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid [solver] section: {exc}") from exc


def parse_config(text, base_dir=None):
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    sections = {name: {k: _value(v) for k, v in parser[name].items()} for name in parser.sections()}
    return RunConfig(sections, Path(base_dir) if base_dir else Path.cwd())


def load_config(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text(), base_dir=path.parent)
