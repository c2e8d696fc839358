"""Quasi-probability distributions on a truncated Fock space."""

import json

from ._core import (
    Convention,
    IllPosed,
    QpdError,
    QuadratureError,
    SupportOverflow,
    ValidationError,
    channel_params,
    density_matrix,
    distribution,
    evolve_husimi,
    moment_integral,
    moment_integral_quadrature,
)
from ._core import verify as _verify


def verify(suite="all", dim=64):
    """Runs a self-check suite and returns the parsed report."""
    return json.loads(_verify(suite, dim))


__all__ = [
    "Convention",
    "IllPosed",
    "QpdError",
    "QuadratureError",
    "SupportOverflow",
    "ValidationError",
    "channel_params",
    "density_matrix",
    "distribution",
    "evolve_husimi",
    "moment_integral",
    "moment_integral_quadrature",
    "verify",
]
