"""Sparse multimode bosonic Fock states.

A mode is a (spatial port, polarization, temporal index) triple. States are
stored as a map from canonical occupation patterns to complex amplitudes,
which keeps circuits with a handful of photons over a dozen modes cheap. All
state values are immutable; every operation returns a new state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

PRUNE_EPS = 1e-14
NORM_FLOOR = 1e-150


class ZeroNormError(ValueError):
    """Raised when normalizing a numerically zero state.

    Signals an impossible post-selection branch rather than a bug.
    """


@dataclass(frozen=True, order=True)
class ModeLabel:
    """One bosonic mode: spatial port, polarization (0 = H, 1 = V), temporal index."""

    port: str
    pol: int
    temporal: int = 0

    def __post_init__(self):
        if self.pol not in (0, 1):
            raise ValueError(f"polarization index must be 0 or 1, got {self.pol}")
        if self.temporal < 0:
            raise ValueError(f"temporal index must be nonnegative, got {self.temporal}")

    def __str__(self):
        return f"{self.port}.{'HV'[self.pol]}{self.temporal}"


# An occupation pattern is a sorted tuple of (ModeLabel, count) with count >= 1.
OccupationPattern = tuple[tuple[ModeLabel, int], ...]


def canonical_pattern(entries: Iterable[tuple[ModeLabel, int]]) -> OccupationPattern:
    """Merge duplicate modes, drop zero counts, and sort into the canonical key."""
    counts: dict[ModeLabel, int] = {}
    for mode, n in entries:
        if n < 0:
            raise ValueError(f"negative occupation {n} for {mode}")
        if n:
            counts[mode] = counts.get(mode, 0) + n
    return tuple(sorted(counts.items()))


def pattern_photon_count(pattern: OccupationPattern) -> int:
    return sum(n for _, n in pattern)


class StateVector:
    """Sparse Fock state: occupation patterns mapped to complex amplitudes.

    Amplitudes with magnitude below ``prune_eps`` are dropped on construction;
    the default (1e-14) is far below every tolerance used by the simulator.
    """

    __slots__ = ("_amp",)

    def __init__(self, amplitudes: Mapping[OccupationPattern, complex] | None = None,
                 prune_eps: float = PRUNE_EPS):
        merged: dict[OccupationPattern, complex] = {}
        for pattern, a in (amplitudes or {}).items():
            a = complex(a)
            if not (math.isfinite(a.real) and math.isfinite(a.imag)):
                raise ValueError(f"non-finite amplitude {a!r} for pattern {pattern}")
            key = canonical_pattern(pattern)
            merged[key] = merged.get(key, 0j) + a
        object.__setattr__(self, "_amp",
                           {k: v for k, v in merged.items() if abs(v) >= prune_eps})

    # -- basic queries -------------------------------------------------

    def terms(self) -> Iterator[tuple[OccupationPattern, complex]]:
        return iter(self._amp.items())

    def patterns(self) -> Iterator[OccupationPattern]:
        return iter(self._amp.keys())

    def amplitude(self, pattern: Iterable[tuple[ModeLabel, int]]) -> complex:
        return self._amp.get(canonical_pattern(pattern), 0j)

    def num_terms(self) -> int:
        return len(self._amp)

    def is_zero(self) -> bool:
        return not self._amp

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._amp.values()))

    def photon_numbers(self) -> set[int]:
        """Total photon numbers present across basis terms."""
        return {pattern_photon_count(p) for p in self._amp}

    def __len__(self):
        return len(self._amp)

    def __repr__(self):
        if not self._amp:
            return "StateVector(0)"
        return f"StateVector({format_state(self)!r})"

    # -- algebra --------------------------------------------------------

    def scaled(self, c: complex) -> "StateVector":
        return StateVector({p: a * c for p, a in self._amp.items()})

    def add(self, other: "StateVector") -> "StateVector":
        out = dict(self._amp)
        for p, a in other._amp.items():
            out[p] = out.get(p, 0j) + a
        return StateVector(out)

    def normalize(self) -> tuple["StateVector", float]:
        """Return (unit-norm state, original norm).

        Raises ZeroNormError when the norm sits at the numeric floor.
        """
        n = self.norm()
        if n <= NORM_FLOOR:
            raise ZeroNormError("cannot normalize a zero state")
        return self.scaled(1.0 / n), n

    def inner_product(self, other: "StateVector") -> complex:
        """<self|other>, summed over shared occupation patterns."""
        total = 0j
        for p, a in self._amp.items():
            b = other._amp.get(p)
            if b is not None:
                total += a.conjugate() * b
        return total

    def tensor(self, other: "StateVector") -> "StateVector":
        """Product state; overlapping modes merge by occupation addition."""
        out: dict[OccupationPattern, complex] = {}
        for p1, a1 in self._amp.items():
            for p2, a2 in other._amp.items():
                key = canonical_pattern(p1 + p2)
                out[key] = out.get(key, 0j) + a1 * a2
        return StateVector(out)

    def create_photon(self, mode: ModeLabel) -> "StateVector":
        """Apply the creation operator for ``mode`` (amplitude gains sqrt(n+1))."""
        out: dict[OccupationPattern, complex] = {}
        for pattern, a in self._amp.items():
            counts = dict(pattern)
            n = counts.get(mode, 0)
            counts[mode] = n + 1
            key = tuple(sorted(counts.items()))
            out[key] = out.get(key, 0j) + a * math.sqrt(n + 1)
        return StateVector(out)

    def create_superposed(self, parts: Iterable[tuple[ModeLabel, complex]]) -> "StateVector":
        """Apply a superposed creation operator sum(c_k * adag(mode_k))."""
        acc: dict[OccupationPattern, complex] = {}
        for mode, c in parts:
            if abs(c) == 0.0:
                continue
            piece = self.create_photon(mode).scaled(c)
            for p, a in piece._amp.items():
                acc[p] = acc.get(p, 0j) + a
        return StateVector(acc)


def vacuum() -> StateVector:
    return StateVector({(): 1.0 + 0j})


def basis_state(entries: Iterable[tuple[ModeLabel, int]], amplitude: complex = 1.0) -> StateVector:
    return StateVector({canonical_pattern(entries): amplitude})


def single_photon(mode: ModeLabel) -> StateVector:
    return basis_state([(mode, 1)])


def format_state(state: StateVector) -> str:
    """Debug serialization: one line per term, ``(re,im) |n@mode, ...>``.

    Terms are sorted by pattern so the output is stable for golden tests.
    """
    lines = []
    for pattern in sorted(state.patterns()):
        a = state.amplitude(pattern)
        if pattern:
            body = ", ".join(f"{n}@{mode}" for mode, n in pattern)
        else:
            body = "vac"
        lines.append(f"({a.real!r},{a.imag!r}) |{body}>")
    return "\n".join(lines)
