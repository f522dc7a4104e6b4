"""Optical elements acting on polarization-encoded photonic modes.

Linear elements are expressed as matrices on creation operators over
(port, polarization) channels; applying one to a multi-photon state expands
the transformed creation-operator polynomial on vacuum. Temporal indices ride
along untouched, so a single matrix acts identically on every temporal layer.

Conventions used throughout:
  |0> = horizontal, |1> = vertical, |+/-> = (|0> +/- |1>)/sqrt(2).
  The polarizing beam splitter transmits |+> (keeps its port) and reflects
  |-> (swaps ports), with real positive coefficients in the +/- basis.
  Half-wave plate at angle phi: [[cos 2phi, sin 2phi], [sin 2phi, -cos 2phi]].
  Polarization rotation by phi: [[cos phi, -sin phi], [sin phi, cos phi]].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fock import ModeLabel, OccupationPattern, StateVector, canonical_pattern

UNITARY_TOL = 1e-12

# A channel is one (port, polarization) pair; temporal structure is implicit.
Channel = tuple[str, int]


class UnknownModeError(KeyError):
    """An occupied mode sits on one of the element's ports but not in its channel list."""


@dataclass(frozen=True, eq=False)
class ModeTransform:
    """Linear map on creation operators: adag_in[i] -> sum_j matrix[j, i] * adag_out[j]."""

    in_channels: tuple[Channel, ...]
    out_channels: tuple[Channel, ...]
    matrix: np.ndarray
    unitary: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.shape != (len(self.out_channels), len(self.in_channels)):
            raise ValueError("matrix shape does not match channel lists")
        if self.unitary:
            gram = m.conj().T @ m
            if not np.allclose(gram, np.eye(len(self.in_channels)), atol=UNITARY_TOL):
                raise ValueError("transform flagged unitary but U^dag U != I")

    @property
    def ports(self) -> frozenset[str]:
        return frozenset(p for p, _ in self.in_channels)


@dataclass(frozen=True)
class ProjectiveFilter:
    """Absorbing polarization analyzer on one port; pass axis at angle_deg from |0>."""

    port: str
    angle_deg: float


def pbs(port_a: str, port_b: str) -> ModeTransform:
    """Polarizing beam splitter: |+> transmitted (same port), |-> reflected (swapped).

    In the computational basis this is a real symmetric 4x4 involution over
    the channels (a,0), (a,1), (b,0), (b,1).
    """
    if port_a == port_b:
        raise ValueError("pbs needs two distinct ports")
    channels = ((port_a, 0), (port_a, 1), (port_b, 0), (port_b, 1))
    m = 0.5 * np.array([
        [1, 1, 1, -1],
        [1, 1, -1, 1],
        [1, -1, 1, 1],
        [-1, 1, 1, 1],
    ], dtype=complex)
    return ModeTransform(channels, channels, m, unitary=True)


def half_wave_plate(port: str, plate_angle_deg: float) -> ModeTransform:
    phi = math.radians(plate_angle_deg)
    c, s = math.cos(2 * phi), math.sin(2 * phi)
    channels = ((port, 0), (port, 1))
    return ModeTransform(channels, channels,
                         np.array([[c, s], [s, -c]], dtype=complex), unitary=True)


def polarization_rotation(port: str, angle_deg: float) -> ModeTransform:
    phi = math.radians(angle_deg)
    c, s = math.cos(phi), math.sin(phi)
    channels = ((port, 0), (port, 1))
    return ModeTransform(channels, channels,
                         np.array([[c, -s], [s, c]], dtype=complex), unitary=True)


def beam_splitter(port_a: str, port_b: str) -> ModeTransform:
    """Polarization-preserving 50/50 coupler between two ports (test and demo element)."""
    if port_a == port_b:
        raise ValueError("beam_splitter needs two distinct ports")
    channels = ((port_a, 0), (port_a, 1), (port_b, 0), (port_b, 1))
    r = 1.0 / math.sqrt(2.0)
    m = np.array([
        [r, 0, r, 0],
        [0, r, 0, r],
        [r, 0, -r, 0],
        [0, r, 0, -r],
    ], dtype=complex)
    return ModeTransform(channels, channels, m, unitary=True)


_FACTORIAL_SQRT = [math.sqrt(math.factorial(n)) for n in range(24)]


def _sqrt_factorial(n: int) -> float:
    if n < len(_FACTORIAL_SQRT):
        return _FACTORIAL_SQRT[n]
    return math.sqrt(math.factorial(n))


def apply_transform(state: StateVector, t: ModeTransform) -> StateVector:
    """Apply a mode transform to every basis term of ``state``.

    Each term |n_1 @ m_1, ...> is Prod_i adag(m_i)^n_i / sqrt(n_i!) |vac>; the
    transformed creation operators are multiplied out and every resulting
    monomial Prod_j adag^m_j picks up Prod_j sqrt(m_j!).
    """
    col = {ch: i for i, ch in enumerate(t.in_channels)}
    ports = t.ports
    out_labels_by_col: list[list[tuple[int, complex]]] = []
    for i in range(len(t.in_channels)):
        out_labels_by_col.append(
            [(j, t.matrix[j, i]) for j in range(len(t.out_channels))
             if t.matrix[j, i] != 0])

    result: dict[OccupationPattern, complex] = {}
    for pattern, amp in state.terms():
        moved: list[tuple[int, int, int]] = []   # (column, temporal, count)
        kept: list[tuple[ModeLabel, int]] = []
        for mode, n in pattern:
            ch = (mode.port, mode.pol)
            i = col.get(ch)
            if i is not None:
                moved.append((i, mode.temporal, n))
            elif mode.port in ports:
                raise UnknownModeError(f"occupied mode {mode} not covered by transform")
            else:
                kept.append((mode, n))
        if not moved:
            key = canonical_pattern(kept)
            result[key] = result.get(key, 0j) + amp
            continue

        # Polynomial in output creation operators: monomial -> coefficient.
        denom = 1.0
        for _, _, n in moved:
            denom *= _sqrt_factorial(n)
        poly: dict[OccupationPattern, complex] = {(): amp / denom}
        for i, temporal, n in moved:
            factor = [(ModeLabel(t.out_channels[j][0], t.out_channels[j][1], temporal), u)
                      for j, u in out_labels_by_col[i]]
            for _ in range(n):
                nxt: dict[OccupationPattern, complex] = {}
                for mono, coeff in poly.items():
                    for mode, u in factor:
                        counts = dict(mono)
                        counts[mode] = counts.get(mode, 0) + 1
                        key = tuple(sorted(counts.items()))
                        nxt[key] = nxt.get(key, 0j) + coeff * u
                poly = nxt

        for mono, coeff in poly.items():
            boson = 1.0
            for _, n in mono:
                boson *= _sqrt_factorial(n)
            key = canonical_pattern(kept + list(mono))
            result[key] = result.get(key, 0j) + coeff * boson

    return StateVector(result)


def analyzer_branches(state: StateVector, f: ProjectiveFilter) -> list[tuple[int, StateVector]]:
    """Decompose a state at an absorbing analyzer into classical branches.

    Photons on the filter port are rewritten in the (pass, blocked) basis.
    Branches are keyed by the exact blocked-mode configuration (the absorber
    records it, so distinct configurations never interfere); within a branch
    the blocked photons are removed and the pass photons are rotated back to
    their physical polarization. Squared norms over all branches sum to the
    input's squared norm. The first returned entry, when present with lost
    count 0, is the fully transmitted branch.
    """
    to_axis = polarization_rotation(f.port, -f.angle_deg)
    from_axis = polarization_rotation(f.port, f.angle_deg)
    rotated = apply_transform(state, to_axis)

    groups: dict[OccupationPattern, dict[OccupationPattern, complex]] = {}
    for pattern, amp in rotated.terms():
        blocked = []
        passed = []
        for mode, n in pattern:
            if mode.port == f.port and mode.pol == 1:
                blocked.append((mode, n))
            else:
                passed.append((mode, n))
        bkey = tuple(blocked)
        bucket = groups.setdefault(bkey, {})
        pkey = canonical_pattern(passed)
        bucket[pkey] = bucket.get(pkey, 0j) + amp

    branches = []
    for bkey in sorted(groups, key=lambda k: (sum(n for _, n in k), k)):
        branch = StateVector(groups[bkey])
        if branch.is_zero():
            continue
        branch = apply_transform(branch, from_axis)
        branches.append((sum(n for _, n in bkey), branch))
    return branches


def analyzer_project(state: StateVector, f: ProjectiveFilter) -> StateVector:
    """Project photons on the filter port onto its pass axis.

    The blocked component is absorbed and those branches dropped; the result
    is unnormalized and its squared norm is the pass probability.
    """
    for lost, branch in analyzer_branches(state, f):
        if lost == 0:
            return branch
    return StateVector({})
