"""Gaussian sections on the covering plane and their algebra-valued pairings.

A section is a finite sum of terms

    coeff * exp(-(pi s / 2) * ((x - mux)^2 + (y - muy)^2) + i (kx x + ky y)),

all sharing the width parameter ``s > 0``.  The lattice acts projectively by
``psi . gamma = exp(i s phi_gamma) gamma^* psi`` with linear phase functions
``phi_gamma`` (symmetric gauge), which keeps the family closed: translation
moves the center, the phase folds into the wave vector and coefficient.

The algebra-valued pairing sums plain L^2 inner products of translates,

    <psi|phi>_R = sum_{|gamma| <= R} [gamma] * <psi . gamma, phi>_{L^2(R^2)},

with Gaussian tail decay in the truncation radius R.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import AlgebraElement, Lattice, ball_points, involution, trace
from .errors import UnsupportedGaugeError


@dataclass(frozen=True)
class GaussianTerm:
    coeff: complex
    center: tuple[float, float]
    wave: tuple[float, float]


class GaussianSection:
    """Finite sum of Gaussian terms sharing one width parameter ``s``."""

    __slots__ = ("s", "terms")

    def __init__(self, s: float, terms: Sequence[GaussianTerm]):
        if s <= 0:
            raise ValueError("width parameter s must be positive")
        if not terms:
            raise ValueError("section needs at least one term")
        self.s = float(s)
        self.terms = tuple(terms)

    def scale(self, z: complex) -> "GaussianSection":
        return GaussianSection(
            self.s, [GaussianTerm(z * t.coeff, t.center, t.wave) for t in self.terms]
        )

    def __call__(self, x, y):
        s = self.s
        total = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for t in self.terms:
            total += t.coeff * np.exp(
                -(math.pi * s / 2.0)
                * ((x - t.center[0]) ** 2 + (y - t.center[1]) ** 2)
                + 1j * (t.wave[0] * x + t.wave[1] * y)
            )
        return total

    def to_json(self) -> str:
        records = [
            {
                "re": t.coeff.real,
                "im": t.coeff.imag,
                "mux": t.center[0],
                "muy": t.center[1],
                "kx": t.wave[0],
                "ky": t.wave[1],
                "s": self.s,
            }
            for t in self.terms
        ]
        return json.dumps(records)

    @classmethod
    def from_json(cls, text: str) -> "GaussianSection":
        records = json.loads(text)
        widths = {r["s"] for r in records}
        if len(widths) != 1:
            raise ValueError("all terms of a section must share the width s")
        terms = [
            GaussianTerm(
                complex(r["re"], r["im"]), (r["mux"], r["muy"]), (r["kx"], r["ky"])
            )
            for r in records
        ]
        return cls(widths.pop(), terms)


def vacuum(s: float) -> GaussianSection:
    return GaussianSection(s, [GaussianTerm(1.0, (0.0, 0.0), (0.0, 0.0))])


def symmetric_phi(gamma: Lattice, kappa: float = math.pi):
    """Phase polynomial kappa*(m x - n y) of the symmetric gauge, as (const, cx, cy)."""
    n, m = gamma
    return (0.0, kappa * m, -kappa * n)


def project_act(
    psi: GaussianSection,
    gamma: Lattice,
    phi_family: Callable[[Lattice], tuple[float, float, float]] | None = None,
) -> GaussianSection:
    """Projective action ``psi . gamma = exp(i s phi_gamma) gamma^* psi``.

    ``phi_family`` maps gamma to the coefficients (const, cx, cy) of a linear
    phase function; gauges with non-linear phases leave the Gaussian family
    and are rejected.
    """
    if phi_family is None:
        phi_family = symmetric_phi
    parts = phi_family(gamma)
    if len(parts) != 3:
        raise UnsupportedGaugeError("phase function must be linear (const, cx, cy)")
    const, cx, cy = parts
    s = psi.s
    n, m = gamma
    out = []
    for t in psi.terms:
        # gamma^* psi translates the center; e^{i k.gamma} folds into the
        # coefficient; the linear phase s*(cx x + cy y) folds into the wave.
        coeff = t.coeff * cmath.exp(1j * (t.wave[0] * n + t.wave[1] * m + s * const))
        center = (t.center[0] - n, t.center[1] - m)
        wave = (t.wave[0] + s * cx, t.wave[1] + s * cy)
        out.append(GaussianTerm(coeff, center, wave))
    return GaussianSection(s, out)


def _inner_1d(a: float, mu1: float, mu2: float, k1: float, k2: float) -> complex:
    # int exp(-a(x-mu1)^2 - a(x-mu2)^2 + i(k2-k1)x) dx, a = pi*s/2
    dk = k2 - k1
    dmu = mu1 - mu2
    mid = 0.5 * (mu1 + mu2)
    return (
        math.sqrt(math.pi / (2.0 * a))
        * cmath.exp(-0.5 * a * dmu * dmu - dk * dk / (8.0 * a) + 1j * dk * mid)
    )


def l2_inner(psi: GaussianSection, phi: GaussianSection) -> complex:
    """Exact Gaussian-integral value of ``int conj(psi) phi dx dy``."""
    if psi.s != phi.s:
        raise ValueError("sections must share the width parameter s")
    a = math.pi * psi.s / 2.0
    total = 0.0 + 0.0j
    for t1 in psi.terms:
        for t2 in phi.terms:
            total += (
                t1.coeff.conjugate()
                * t2.coeff
                * _inner_1d(a, t1.center[0], t2.center[0], t1.wave[0], t2.wave[0])
                * _inner_1d(a, t1.center[1], t2.center[1], t1.wave[1], t2.wave[1])
            )
    return total


def module_inner(
    psi: GaussianSection,
    phi: GaussianSection,
    radius: int,
    phi_family: Callable[[Lattice], tuple[float, float, float]] | None = None,
) -> AlgebraElement:
    """Algebra-valued inner product truncated to the sup-norm ball.

    Coefficient at gamma is ``<psi . gamma, phi>_{L^2}``; summation runs in
    lexicographic gamma order for bit-stable output.  Dropped-tail size is
    of order exp(-(pi s / 2) R^2).
    """
    if radius < 1:
        raise ValueError("truncation radius must be >= 1")
    coeffs = {}
    for gamma in ball_points(radius):
        value = l2_inner(project_act(psi, gamma, phi_family), phi)
        if value != 0:
            coeffs[gamma] = value
    return AlgebraElement(coeffs)


def module_trace(psi: GaussianSection, cocycle, s: float, radius: int) -> float:
    """Trace of the self-pairing; equals the plain L^2 norm by construction."""
    gram = module_inner(psi, psi, radius)
    return trace(gram, cocycle, s).real


def gram_positivity(
    sections: Sequence[GaussianSection],
    cocycle,
    s: float,
    radius: int,
    rep_radius: int,
) -> dict:
    """Assemble regular-representation images of all pairings; report PSD data.

    The block matrix [rep(<psi_i|psi_j>)] is the compression of a positive
    element, so its smallest eigenvalue must not dip below roundoff plus the
    Gaussian truncation tail.
    """
    import warnings

    from .algebra import regular_representation

    k = len(sections)
    dim = (2 * rep_radius + 1) ** 2
    big = np.zeros((k * dim, k * dim), dtype=complex)
    for i, psi in enumerate(sections):
        for j, phi in enumerate(sections):
            if j < i:
                continue
            gram = module_inner(psi, phi, radius)
            with warnings.catch_warnings():
                # rep_radius < radius is intended: the Gram element is
                # compressed, its tail accounted for by tail_bound
                warnings.simplefilter("ignore", UserWarning)
                block = regular_representation(gram, cocycle, s, rep_radius)
            big[i * dim : (i + 1) * dim, j * dim : (j + 1) * dim] = block
            if j > i:
                big[j * dim : (j + 1) * dim, i * dim : (i + 1) * dim] = block.conj().T
    big = 0.5 * (big + big.conj().T)
    eigvals = np.linalg.eigvalsh(big)
    return {
        "sections": k,
        "dimension": k * dim,
        "min_eigenvalue": float(eigvals[0]),
        "max_eigenvalue": float(eigvals[-1]),
        "tail_bound": math.exp(-(math.pi * s / 2.0) * radius**2),
    }


def hermitian_defect(psi: GaussianSection, phi: GaussianSection, cocycle, s: float, radius: int) -> float:
    """Max coefficient difference between <psi|phi>* and <phi|psi>."""
    left = involution(module_inner(psi, phi, radius), cocycle, s)
    right = module_inner(phi, psi, radius)
    diff = left - right
    return max((abs(z) for z in diff.terms.values()), default=0.0)
