"""Closed-form index and trace values for quantized surfaces.

For a genus-g surface with ``vol = integral of omega / 2 pi`` the index of
the twisted Dolbeault operator expands as

    s * vol + (1 - g) - d0 / 2,

the linear Todd term contributing 1 - g and the exponential term
s * vol - d0 / 2 (d0 is the degree of the auxiliary line bundle; the d0 != 0
branch is experimental, see natsume_nest_trace).  On the torus (g = 1,
vol = 1) at integer s = N this is the flux count N; under the genus-g
normalization vol = g - 1 it reduces to (s - 1)(g - 1).
"""

from __future__ import annotations

from .dolbeault import build_dolbeault, kernel_dimension
from .errors import IndexViolationError


def l2_index(genus: int, vol: float, s: float, d0: float = 0.0) -> float:
    if vol <= 0:
        raise ValueError("volume must be positive")
    if genus < 1:
        raise ValueError("genus must be >= 1")
    return s * vol + (1.0 - genus) - d0 / 2.0


def natsume_nest_trace(genus: int, s: float) -> float:
    """(s - 1)(g - 1) for genus >= 2, cross-checked against the index path."""
    if genus < 2:
        raise ValueError("trace formula applies to genus >= 2")
    value = (s - 1.0) * (genus - 1.0)
    index = l2_index(genus, vol=float(genus - 1), s=s)
    if abs(value - index) > 1e-12 * max(1.0, abs(value)):
        raise IndexViolationError(
            f"trace value {value!r} disagrees with index expansion {index!r}"
        )
    return value


def numeric_index_crosscheck(n_flux: int, grid: int, gauge: str = "landau") -> dict:
    """Compare the lattice kernel dimension with the torus index formula.

    At zero flux the formula counts the holomorphic Euler characteristic (0)
    while the lattice kernel holds the constants (1); that known flat-case
    discrepancy is flagged, not failed.
    """
    pair = build_dolbeault(n_flux, grid, gauge)
    dim = kernel_dimension(pair)
    formula = l2_index(genus=1, vol=1.0, s=float(n_flux))
    if n_flux == 0:
        return {
            "n_flux": 0,
            "grid": grid,
            "kernel_dim": dim,
            "index_formula": formula,
            "match": False,
            "flat_case_flagged": True,
        }
    if dim != round(formula):
        raise IndexViolationError(
            f"kernel dimension {dim} != index formula {formula} at flux {n_flux}"
        )
    return {
        "n_flux": n_flux,
        "grid": grid,
        "kernel_dim": dim,
        "index_formula": formula,
        "match": True,
        "flat_case_flagged": False,
    }
