"""Temporal-mode model for partially distinguishable photons.

Each photon carries a Gaussian wavepacket (center time, width, family tag).
Pairwise overlaps form a Gram matrix whose semidefinite Cholesky factor gives
every photon an expansion over a small orthonormal temporal basis; that
expansion is what the circuit engine injects into the Fock simulation, so
Hong-Ou-Mandel physics emerges from plain mode bookkeeping.

width_sigma is the standard deviation of the single-photon intensity profile
|psi(t)|^2, i.e. psi(t) = (2 pi s^2)^(-1/4) exp(-(t - t0)^2 / (4 s^2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PSD_TOL = 1e-9
_PIVOT_TOL = 1e-14
_COEFF_PRUNE = 1e-15


class NotPSDError(ValueError):
    """The photon overlap Gram matrix has a significantly negative eigenvalue."""


@dataclass(frozen=True)
class PhotonWavepacket:
    center_time: float = 0.0
    width_sigma: float = 1.0
    tag: str = "default"

    def __post_init__(self):
        if not self.width_sigma > 0:
            raise ValueError(f"width_sigma must be positive, got {self.width_sigma}")


def gaussian_envelope(w1: PhotonWavepacket, w2: PhotonWavepacket) -> float:
    """Overlap integral of two transform-limited Gaussian wavepackets."""
    s1, s2 = w1.width_sigma, w2.width_sigma
    dt = w1.center_time - w2.center_time
    ssum = s1 * s1 + s2 * s2
    return math.sqrt(2.0 * s1 * s2 / ssum) * math.exp(-dt * dt / (4.0 * ssum))


def gaussian_overlap(w1: PhotonWavepacket, w2: PhotonWavepacket,
                     cross_family: float = 1.0) -> float:
    """Pairwise overlap; ``cross_family`` scales pairs with different tags.

    Real-valued in this model, symmetric, and never above 1 in magnitude.
    """
    if not 0.0 <= cross_family <= 1.0:
        raise ValueError(f"cross-family factor must lie in [0, 1], got {cross_family}")
    factor = 1.0 if w1.tag == w2.tag else cross_family
    return factor * gaussian_envelope(w1, w2)


@dataclass(frozen=True)
class OverlapModel:
    """Static pairwise overlap factors between photon families.

    ``pair_factors`` maps unordered tag pairs to a factor in [0, 1];
    unlisted cross-family pairs fall back to ``cross_family_default`` and
    same-tag pairs always get 1.
    """

    pair_factors: dict[frozenset, float] = field(default_factory=dict)
    cross_family_default: float = 1.0

    def factor(self, tag_a: str, tag_b: str) -> float:
        if tag_a == tag_b:
            return 1.0
        return self.pair_factors.get(frozenset((tag_a, tag_b)), self.cross_family_default)

    def overlap(self, w1: PhotonWavepacket, w2: PhotonWavepacket) -> float:
        return self.factor(w1.tag, w2.tag) * gaussian_envelope(w1, w2)


def build_overlap_matrix(photons: list[PhotonWavepacket],
                         model: OverlapModel | None = None) -> np.ndarray:
    """Hermitian unit-diagonal Gram matrix of pairwise wavepacket overlaps."""
    model = model or OverlapModel()
    n = len(photons)
    g = np.eye(n, dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            v = model.overlap(photons[i], photons[j])
            g[i, j] = v
            g[j, i] = v
    return g


def _semidefinite_cholesky(g: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L L^dag = g, tolerating zero pivots.

    Plain numpy.linalg.cholesky rejects singular matrices, but identical
    photons produce exactly singular Gram matrices here.
    """
    n = g.shape[0]
    lower = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i + 1):
            s = g[i, j] - np.dot(lower[i, :j], lower[j, :j].conj())
            if i == j:
                lower[i, i] = math.sqrt(max(s.real, 0.0))
            elif abs(lower[j, j]) > _PIVOT_TOL:
                lower[i, j] = s / lower[j, j]
    return lower


@dataclass(frozen=True, eq=False)
class TemporalBasis:
    """Per-photon expansion coefficients over an orthonormal temporal basis."""

    photons: tuple[PhotonWavepacket, ...]
    coefficients: np.ndarray   # lower triangular; row i spans temporal modes 0..i

    def row(self, i: int) -> list[tuple[int, complex]]:
        """Nonzero (temporal index, coefficient) entries for photon i."""
        return [(k, self.coefficients[i, k])
                for k in range(i + 1)
                if abs(self.coefficients[i, k]) > _COEFF_PRUNE]

    @property
    def n_modes(self) -> int:
        return self.coefficients.shape[0]


def build_temporal_basis(photons: list[PhotonWavepacket],
                         model: OverlapModel | None = None) -> TemporalBasis:
    """Factor the overlap Gram matrix so photon i = sum_k L[i,k] adag(temporal k).

    Raises NotPSDError when the overlaps are mutually inconsistent (an
    eigenvalue below -1e-9).
    """
    g = build_overlap_matrix(photons, model)
    if len(photons) and np.linalg.eigvalsh(g).min() < -PSD_TOL:
        raise NotPSDError("overlap matrix is not positive semidefinite")
    lower = _semidefinite_cholesky(g)
    return TemporalBasis(tuple(photons), lower)
