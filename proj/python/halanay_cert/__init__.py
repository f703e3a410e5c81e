"""Mittag-Leffler stability certificates for fractional delay systems."""

import json

from ._core import (
    ConvergenceError,
    EXIT_INPUT_ERROR,
    EXIT_PASS,
    EXIT_VIOLATION,
    InfeasibleError,
    TimeExpr,
    __version__,
    h_value,
    jacobi_eigenvalues,
    lambda_at,
    lmi_block,
    max_eigen_sym,
    mittag_leffler,
    mittag_leffler_deriv,
    run_command,
    solve,
)
from . import _core


def load_config(path):
    """Validated config as a dict, expressions in canonical form."""
    return json.loads(_core.load_config(str(path)))


def _run(fn, config, out_dir):
    code, report = fn(str(config), str(out_dir))
    return code, json.loads(report)


def certify(config, out_dir="."):
    """Returns (exit_code, report dict)."""
    return _run(_core.certify, config, out_dir)


def simulate(config, out_dir="."):
    return _run(_core.simulate, config, out_dir)


def verify(config, out_dir="."):
    return _run(_core.verify, config, out_dir)


__all__ = [
    "ConvergenceError",
    "EXIT_INPUT_ERROR",
    "EXIT_PASS",
    "EXIT_VIOLATION",
    "InfeasibleError",
    "TimeExpr",
    "certify",
    "h_value",
    "jacobi_eigenvalues",
    "lambda_at",
    "lmi_block",
    "load_config",
    "max_eigen_sym",
    "mittag_leffler",
    "mittag_leffler_deriv",
    "run_command",
    "simulate",
    "solve",
    "verify",
]
