"""Spectral analysis of the linearized hard-sphere Boltzmann operator.

Thin wrapper over the C++ core: reports come back as parsed JSON (dicts) with the
same schema as the ``boltzspec`` command-line tool.
"""

import csv
import io
import json

from ._core import (
    SCHEMA_VERSION,
    ConfigError,
    NumericalError,
    b_function,
    collision_frequency,
    k_star,
)
from ._core import Session as _CoreSession

__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "NumericalError",
    "Session",
    "b_function",
    "collision_frequency",
    "k_star",
]


class Session:
    """Lazily assembled operators for one run configuration.

    Keyword arguments are the configuration keys of the command-line tool
    (dim, degree, quad_order, k, p, poly_degree, r0, a, direction, r_grid,
    t_grid, cache_dir, seed, ...).
    """

    def __init__(self, **config):
        self._core = _CoreSession(json.dumps(config))

    @property
    def config(self):
        return json.loads(self._core.config_json())

    @property
    def basis_size(self):
        return self._core.basis_size()

    def collision_matrix(self):
        """Galerkin matrix of L in the orthonormal Gaussian basis (complex ndarray)."""
        return self._core.collision_matrix()

    def fourier_matrix(self, xi):
        """Matrix of L_xi = L - i v.xi."""
        return self._core.fourier_matrix(list(map(float, xi)))

    def spectral_gap(self):
        return self._core.a0()

    def thresholds(self):
        return json.loads(self._core.thresholds_json())

    def spectrum(self, xi):
        return json.loads(self._core.spectrum_json(list(map(float, xi))))

    def branches(self, r_grid):
        """Hydrodynamic branches as a list of row dicts (r, branch, re, im, multiplicity)."""
        text = self._core.branches_csv(list(map(float, r_grid)), True)
        rows = []
        for row in csv.DictReader(io.StringIO(text)):
            rows.append(
                {
                    "r": float(row["r"]),
                    "branch": int(row["branch"]),
                    "re": float(row["re"]),
                    "im": float(row["im"]),
                    "multiplicity": int(row["multiplicity"]),
                }
            )
        return rows

    def coeffs(self):
        return json.loads(self._core.coeffs_json())

    def projectors(self, r=0.1, with_matrices=False):
        return json.loads(self._core.projectors_json(float(r), bool(with_matrices)))

    def semigroup(self, xi):
        return json.loads(self._core.semigroup_json(list(map(float, xi))))

    def enlargement(self, xi):
        return json.loads(self._core.enlargement_json(list(map(float, xi))))

    def validate(self):
        return json.loads(self._core.validate_json())
