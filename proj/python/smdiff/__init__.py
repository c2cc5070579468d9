"""Finite element solver for steady multicomponent Stefan-Maxwell diffusion."""

import json as _json

import numpy as _np

from . import _core
from ._core import (
    ConfigError,
    Error,
    augmented_matrix,
    check_config,
    onsager_matrix,
    run_experiment,
    spectral_report,
)

__all__ = [
    "ConfigError",
    "Error",
    "augmented_matrix",
    "check_config",
    "lung_demo",
    "manufactured_convergence",
    "onsager_matrix",
    "run_experiment",
    "spectral_report",
]


def manufactured_convergence(meshes=(8, 16, 32, 64), order=1, epsilon=1e-13, gamma=1.0, threads=1):
    """Run the four-species manufactured study; returns rows, slopes and the CSV table."""
    return _core.manufactured_convergence(list(meshes), order, epsilon, gamma, threads)


def lung_demo(n=64, epsilon=1e-11, max_iterations=50):
    """Solve the inspired/alveolar air demo; returns the report, dof points and mole fractions."""
    out = _core.lung_demo(n, epsilon, max_iterations)
    out["report"] = _json.loads(out["report"])
    out["points"] = _np.asarray(out["points"])
    out["mole_fractions"] = _np.asarray(out["mole_fractions"])
    return out
