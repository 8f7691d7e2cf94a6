"""Twisted group algebra of Z^2 with a real 2-cocycle twist.

Conventions used throughout:

* group elements are integer pairs ``gamma = (n, m)`` composed additively,
  with identity ``E = (0, 0)`` and generators ``U = (1, 0)``, ``V = (0, 1)``;
* a real cocycle ``c`` enters through the unit-modulus twist
  ``sigma_s(g1, g2) = exp(i * s * c(g1, g2))``;
* basis products follow ``[g1][g2] = sigma_s(g1, g2) [g1 + g2]`` and extend
  bilinearly to finitely supported coefficient maps;
* cocycles must be normalized, ``c(e, e) = 0``, so that ``[e]`` is the unit.

Truncated regular representations act on the sup-norm ball
``{(n, m): |n| <= R, |m| <= R}`` of the lattice; compressions to the ball give
finite-rank surrogates whose largest singular value estimates the reduced
norm from below, monotonically in ``R``.
"""

from __future__ import annotations

import cmath
import json
import math
import warnings
from typing import Dict, Iterator, Mapping, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import TruncationError

Lattice = Tuple[int, int]

E: Lattice = (0, 0)
U: Lattice = (1, 0)
V: Lattice = (0, 1)

COEFF_PRUNE = 0.0  # coefficients exactly zero are dropped


def compose(g1: Lattice, g2: Lattice) -> Lattice:
    return (g1[0] + g2[0], g1[1] + g2[1])


def inverse(g: Lattice) -> Lattice:
    return (-g[0], -g[1])


class KappaCocycle:
    """Closed-form cocycle ``c((n,m),(n',m')) = kappa * (m n' - n m')``."""

    def __init__(self, kappa: float = math.pi):
        self.kappa = float(kappa)

    def __call__(self, g1: Lattice, g2: Lattice) -> float:
        return self.kappa * (g1[1] * g2[0] - g1[0] * g2[1])

    def __repr__(self) -> str:
        return f"KappaCocycle(kappa={self.kappa!r})"


class TabulatedCocycle:
    """Cocycle given by a finite table on pairs of lattice elements.

    Rejected at construction unless normalized (``c(e, e) = 0``), which is
    what makes ``[e]`` the unit of the algebra.
    """

    def __init__(self, values: Mapping[Tuple[Lattice, Lattice], float]):
        table = {(tuple(k[0]), tuple(k[1])): float(v) for k, v in values.items()}
        if abs(table.get((E, E), 0.0)) > 1e-12:
            raise ValueError("cocycle not normalized: c(e, e) != 0")
        self._table = table

    def __call__(self, g1: Lattice, g2: Lattice) -> float:
        try:
            return self._table[(g1, g2)]
        except KeyError:
            raise KeyError(f"cocycle table has no entry for {(g1, g2)}") from None

    def pairs(self) -> Iterator[Tuple[Lattice, Lattice]]:
        return iter(self._table)


def sigma(cocycle, s: float, g1: Lattice, g2: Lattice) -> complex:
    """Unit-modulus twist ``exp(i s c(g1, g2))``."""
    return cmath.exp(1j * s * cocycle(g1, g2))


class AlgebraElement:
    """Finitely supported complex coefficient map on Z^2."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Lattice, complex] | None = None):
        clean: Dict[Lattice, complex] = {}
        if terms:
            for g, coeff in terms.items():
                z = complex(coeff)
                if z != 0:
                    key = (int(g[0]), int(g[1]))
                    clean[key] = clean.get(key, 0.0) + z
        self._terms = {g: z for g, z in clean.items() if z != 0}

    @classmethod
    def basis(cls, g: Lattice) -> "AlgebraElement":
        return cls({(int(g[0]), int(g[1])): 1.0})

    @classmethod
    def unit(cls) -> "AlgebraElement":
        return cls.basis(E)

    @property
    def terms(self) -> Dict[Lattice, complex]:
        return dict(self._terms)

    def coefficient(self, g: Lattice) -> complex:
        return self._terms.get((int(g[0]), int(g[1])), 0.0)

    def support(self) -> Iterator[Lattice]:
        return iter(sorted(self._terms))

    def support_radius(self) -> int:
        if not self._terms:
            return 0
        return max(max(abs(n), abs(m)) for n, m in self._terms)

    def l1_norm(self) -> float:
        return sum(abs(z) for z in self._terms.values())

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        out = dict(self._terms)
        for g, z in other._terms.items():
            out[g] = out.get(g, 0.0) + z
        return AlgebraElement(out)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        out = dict(self._terms)
        for g, z in other._terms.items():
            out[g] = out.get(g, 0.0) - z
        return AlgebraElement(out)

    def scale(self, z: complex) -> "AlgebraElement":
        return AlgebraElement({g: z * c for g, c in self._terms.items()})

    def __repr__(self) -> str:
        body = ", ".join(f"{g}: {z:.6g}" for g, z in sorted(self._terms.items()))
        return f"AlgebraElement({{{body}}})"

    def to_json(self) -> str:
        """Canonical serialization: lexicographic (n, m) records."""
        records = [
            {"n": g[0], "m": g[1], "re": z.real, "im": z.imag}
            for g, z in sorted(self._terms.items())
        ]
        return json.dumps(records)

    @classmethod
    def from_json(cls, text: str) -> "AlgebraElement":
        records = json.loads(text)
        return cls({(r["n"], r["m"]): complex(r["re"], r["im"]) for r in records})


def multiply(a: AlgebraElement, b: AlgebraElement, cocycle, s: float) -> AlgebraElement:
    """Twisted convolution: bilinear extension of the basis product rule."""
    out: Dict[Lattice, complex] = {}
    for g1, z1 in a._terms.items():
        for g2, z2 in b._terms.items():
            g = compose(g1, g2)
            out[g] = out.get(g, 0.0) + z1 * z2 * sigma(cocycle, s, g1, g2)
    return AlgebraElement(out)


def involution(a: AlgebraElement, cocycle, s: float) -> AlgebraElement:
    """Antilinear star with unitary basis elements, ``[g]* = [g]^{-1}``.

    Since ``[g][g^{-1}] = sigma(g, g^{-1}) [e]`` and ``[e] = 1`` for a
    normalized cocycle, ``[g]* = sigma(g, g^{-1})^{-1} [g^{-1}]``.
    """
    out: Dict[Lattice, complex] = {}
    for g, z in a._terms.items():
        gi = inverse(g)
        phase = sigma(cocycle, s, g, gi)
        out[gi] = out.get(gi, 0.0) + z.conjugate() / phase
    return AlgebraElement(out)


def trace(a: AlgebraElement, cocycle, s: float) -> complex:
    """Canonical tracial state: unit-normalized coefficient at the identity."""
    return sigma(cocycle, s, E, E) * a.coefficient(E)


def ball_points(radius: int) -> list[Lattice]:
    """Lexicographically ordered sup-norm ball, the truncation basis."""
    return [(n, m) for n in range(-radius, radius + 1) for m in range(-radius, radius + 1)]


def _regular_rep_sparse(a: AlgebraElement, cocycle, s: float, radius: int) -> sp.csr_matrix:
    if radius <= 0:
        raise TruncationError(f"truncation radius must be positive, got {radius}")
    if a.support_radius() > radius:
        warnings.warn(
            "support radius %d exceeds truncation radius %d; compression is lossy"
            % (a.support_radius(), radius),
            stacklevel=3,
        )
    points = ball_points(radius)
    index = {g: i for i, g in enumerate(points)}
    dim = len(points)
    rows, cols, vals = [], [], []
    for gp, z in a._terms.items():
        for g, col in index.items():
            target = compose(gp, g)
            row = index.get(target)
            if row is None:
                continue  # hop leaves the ball: compressed away
            rows.append(row)
            cols.append(col)
            vals.append(z * sigma(cocycle, s, gp, g))
    return sp.csr_matrix(
        (np.asarray(vals, dtype=complex), (rows, cols)), shape=(dim, dim)
    )


def regular_representation(
    a: AlgebraElement, cocycle, s: float, radius: int
) -> np.ndarray:
    """Matrix of left multiplication by ``a`` compressed to the ball.

    Entry rule: ``[g'] delta_g = sigma_s(g', g) delta_{g'+g}``, rows/columns
    whose target leaves the ball are truncated.
    """
    return _regular_rep_sparse(a, cocycle, s, radius).toarray()


def norm_estimate(a: AlgebraElement, cocycle, s: float, radius: int) -> float:
    """Largest singular value of the truncated regular representation.

    A finite-rank lower surrogate for the reduced C*-norm: nondecreasing in
    ``radius`` and bounded above by the l1 norm of the coefficients.
    """
    mat = _regular_rep_sparse(a, cocycle, s, radius)
    if mat.nnz == 0:
        return 0.0
    if mat.shape[0] <= 64:
        return float(np.linalg.norm(mat.toarray(), 2))
    v0 = np.ones(mat.shape[0])
    sv = spla.svds(mat, k=1, return_singular_vectors=False, v0=v0)
    return float(sv[0])


def norm_profile(
    a: AlgebraElement,
    s_grid: Sequence[float],
    cocycle,
    radius: int,
    continuity_threshold: float | None = None,
) -> list[tuple[float, float]]:
    """Norm estimates of a fixed coefficient pattern over a grid of twists.

    When ``continuity_threshold`` is given, adjacent profile values are
    required to differ by at most that much; this witnesses (but does not
    prove) continuity of the field of norms in ``s``.
    """
    profile = [(float(s), norm_estimate(a, cocycle, s, radius)) for s in s_grid]
    if continuity_threshold is not None:
        for (s0, n0), (s1, n1) in zip(profile, profile[1:]):
            if abs(n1 - n0) > continuity_threshold:
                raise ValueError(
                    "norm jump %.3g between s=%g and s=%g exceeds threshold %.3g"
                    % (abs(n1 - n0), s0, s1, continuity_threshold)
                )
    return profile


def harper_element(cocycle, s: float) -> AlgebraElement:
    """The canonical self-adjoint hopping element ``[u]+[u]*+[v]+[v]*``."""
    out = AlgebraElement.basis(U) + AlgebraElement.basis(V)
    out = out + involution(out, cocycle, s)
    return out
