"""Photon-source event models.

Every source variant yields, per pump pulse, a finite classical distribution
over initial photon placements (an emission event list). The engine then
propagates each event's pure state separately, so all source noise enters as
a classical mixture at the top level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distinguishability import PhotonWavepacket

MAX_PAIR_PROB = 0.1
MAX_MEAN_PHOTON = 0.5
PROB_FLOOR = 1e-12


class InvalidSpecError(ValueError):
    """Source parameters outside the model's validity range."""


class PortCollisionError(ValueError):
    """Two sources emit into the same spatial port."""


@dataclass(frozen=True)
class IdealSource:
    """Deterministic single photon, optionally prepared at a polarization angle."""

    port: str
    prep_angle_deg: float = 0.0
    time: float = 0.0
    sigma: float = 1.0
    tag: str = "default"


@dataclass(frozen=True)
class SpdcPairSource:
    """Down-conversion pair source with a double-pair term, truncated at 2 pairs.

    Pairs are emitted horizontally polarized; input wave plates shape them.
    """

    port1: str
    port2: str
    pair_prob: float = 0.01
    time: float = 0.0
    sigma: float = 1.0
    tag1: str = "spdc1"
    tag2: str = "spdc2"

    def __post_init__(self):
        if not 0.0 <= self.pair_prob <= MAX_PAIR_PROB:
            raise InvalidSpecError(
                f"pair_prob must lie in [0, {MAX_PAIR_PROB}], got {self.pair_prob}")
        if self.port1 == self.port2:
            raise InvalidSpecError("pair source needs two distinct ports")


@dataclass(frozen=True)
class CoherentSource:
    """Weak coherent pulse, Poissonian and truncated at two photons.

    Emits horizontally polarized; the truncated distribution is renormalized.
    """

    port: str
    mean_photon: float = 0.05
    time: float = 0.0
    sigma: float = 1.0
    tag: str = "pump"

    def __post_init__(self):
        if not 0.0 <= self.mean_photon <= MAX_MEAN_PHOTON:
            raise InvalidSpecError(
                f"mean_photon must lie in [0, {MAX_MEAN_PHOTON}], got {self.mean_photon}")


SourceSpec = IdealSource | SpdcPairSource | CoherentSource


@dataclass(frozen=True)
class SourcePhoton:
    """One emitted photon: port, polarization amplitudes, and wavepacket."""

    port: str
    amp_h: complex
    amp_v: complex
    wavepacket: PhotonWavepacket


@dataclass(frozen=True)
class EmissionEvent:
    photons: tuple[SourcePhoton, ...]
    probability: float

    def count_on_port(self, port: str) -> int:
        return sum(1 for ph in self.photons if ph.port == port)


def _prep_amps(angle_deg: float) -> tuple[float, float]:
    a = math.radians(angle_deg)
    return math.cos(a), math.sin(a)


def source_ports(s: SourceSpec) -> tuple[str, ...]:
    if isinstance(s, SpdcPairSource):
        return (s.port1, s.port2)
    return (s.port,)


def emission_distribution(s: SourceSpec) -> list[EmissionEvent]:
    """Classical per-pulse distribution over photon placements for one source."""
    if isinstance(s, IdealSource):
        c, v = _prep_amps(s.prep_angle_deg)
        wp = PhotonWavepacket(s.time, s.sigma, s.tag)
        return [EmissionEvent((SourcePhoton(s.port, c, v, wp),), 1.0)]

    if isinstance(s, SpdcPairSource):
        p = s.pair_prob
        wp1 = PhotonWavepacket(s.time, s.sigma, s.tag1)
        wp2 = PhotonWavepacket(s.time, s.sigma, s.tag2)
        one_pair = (SourcePhoton(s.port1, 1.0, 0.0, wp1),
                    SourcePhoton(s.port2, 1.0, 0.0, wp2))
        return [
            EmissionEvent((), 1.0 - p - p * p),
            EmissionEvent(one_pair, p),
            EmissionEvent(one_pair + one_pair, p * p),
        ]

    if isinstance(s, CoherentSource):
        mu = s.mean_photon
        wp = PhotonWavepacket(s.time, s.sigma, s.tag)
        weights = [1.0, mu, mu * mu / 2.0]     # Poisson terms, e^-mu cancels in Z
        z = sum(weights)
        photon = SourcePhoton(s.port, 1.0, 0.0, wp)
        return [EmissionEvent((photon,) * n, w / z) for n, w in enumerate(weights)]

    raise InvalidSpecError(f"unknown source spec {s!r}")


def joint_emission(sources: list[SourceSpec]) -> list[EmissionEvent]:
    """Independent product distribution over all sources, pruned below 1e-12."""
    seen: set[str] = set()
    for s in sources:
        for port in source_ports(s):
            if port in seen:
                raise PortCollisionError(f"port {port!r} fed by more than one source")
            seen.add(port)

    events = [EmissionEvent((), 1.0)]
    for s in sources:
        nxt = []
        for base in events:
            for e in emission_distribution(s):
                p = base.probability * e.probability
                if p >= PROB_FLOOR:
                    nxt.append(EmissionEvent(base.photons + e.photons, p))
        events = nxt
    return events


def sample_event(events: list[EmissionEvent], rng: np.random.Generator) -> EmissionEvent:
    """Draw one event; any probability mass lost to pruning goes to the last entry."""
    x = rng.random()
    acc = 0.0
    for e in events:
        acc += e.probability
        if x < acc:
            return e
    return events[-1]


def error_to_valid_ratio(p: float, mu: float) -> float:
    """Dominant-error to valid-event probability ratio for a pair + pulse source.

    Enumerates joint emissions of an SpdcPair(p) and a Coherent(mu) source.
    Error class: at least one down-converted pair present (a photon can reach
    the first gate detector) while the pulse carries two photons. Valid class:
    exactly one pair and one pulse photon.
    """
    pair = SpdcPairSource("q1", "q2", pair_prob=p)
    pulse = CoherentSource("q3", mean_photon=mu)
    error_mass = 0.0
    valid_mass = 0.0
    for e in joint_emission([pair, pulse]):
        n_pairs = e.count_on_port("q1")      # one photon per pair on each port
        n_pulse = e.count_on_port("q3")
        if n_pairs >= 1 and n_pulse == 2:
            error_mass += e.probability
        if n_pairs == 1 and n_pulse == 1:
            valid_mass += e.probability
    if valid_mass == 0.0:
        return 0.0
    return error_mass / valid_mass


def solve_mu_for_error_ratio(p: float, target: float, tol: float = 1e-10) -> float:
    """Bisect the pulse strength until error_to_valid_ratio(p, mu) hits target."""
    lo, hi = 0.0, MAX_MEAN_PHOTON
    if error_to_valid_ratio(p, hi) < target:
        raise ValueError(f"target ratio {target} not reachable with mu <= {hi}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r = error_to_valid_ratio(p, mid)
        if abs(r - target) < tol:
            return mid
        if r < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
