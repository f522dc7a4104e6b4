"""Detector models, measurement outcome distributions, and post-selection.

Detectors are mode-insensitive buckets: a detection collapses every
polarization and temporal mode on the detected port. Distinct detected-mode
configurations are classical alternatives, so coherence survives only in the
undetected modes; that is what makes photon distinguishability degrade
interference here without any density-matrix machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fock import OccupationPattern, StateVector, canonical_pattern

IMPOSSIBLE_PROB = 1e-14
_PARALLEL_TOL = 1e-9

THRESHOLD = "threshold"
NUMBER = "number"


class ImpossiblePatternError(ValueError):
    """Requested detection pattern carries no probability (forbidden branch)."""


@dataclass(frozen=True)
class DetectorSpec:
    name: str
    port: str
    mode: str = THRESHOLD
    efficiency: float = 1.0

    def __post_init__(self):
        if self.mode not in (THRESHOLD, NUMBER):
            raise ValueError(f"detector mode must be threshold or number, got {self.mode!r}")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"efficiency must lie in [0, 1], got {self.efficiency}")


@dataclass(frozen=True)
class DetectionPattern:
    """Per-detector outcomes: fired 0/1 for threshold, count for number mode."""

    outcomes: tuple[tuple[str, int], ...]

    @classmethod
    def from_dict(cls, outcomes: dict[str, int]) -> "DetectionPattern":
        return cls(tuple(sorted(outcomes.items())))

    def outcome(self, name: str) -> int:
        for n, v in self.outcomes:
            if n == name:
                return v
        raise KeyError(name)

    def __str__(self):
        if not self.outcomes:
            return "(none)"
        return ";".join(f"{n}={v}" for n, v in self.outcomes)


LOST = DetectionPattern((("lost", 1),))


@dataclass(frozen=True)
class CoincidenceSpec:
    """Detectors that must all register: fired for threshold, exactly one for number."""

    required: tuple[str, ...]

    def matches(self, pattern: DetectionPattern, detectors: list[DetectorSpec]) -> bool:
        modes = {d.name: d.mode for d in detectors}
        for name in self.required:
            v = pattern.outcome(name)
            if modes.get(name, THRESHOLD) == NUMBER:
                if v != 1:
                    return False
            elif v < 1:
                return False
        return True


@dataclass(frozen=True)
class MeasurementBranch:
    """One detected-mode configuration: counts per port plus the residual it leaves."""

    port_counts: tuple[tuple[str, int], ...]
    probability: float
    residual: StateVector       # unnormalized; squared norm equals probability


def measure(state: StateVector, detectors: list[DetectorSpec]) -> list[MeasurementBranch]:
    """Project onto every detected-mode configuration of the detector ports.

    Works on unnormalized states; branch probabilities then sum to the input's
    squared norm.
    """
    detected_ports = {d.port for d in detectors}
    groups: dict[OccupationPattern, dict[OccupationPattern, complex]] = {}
    for pattern, amp in state.terms():
        det = []
        rest = []
        for mode, n in pattern:
            (det if mode.port in detected_ports else rest).append((mode, n))
        bucket = groups.setdefault(tuple(det), {})
        rkey = canonical_pattern(rest)
        bucket[rkey] = bucket.get(rkey, 0j) + amp

    branches = []
    for det_config in sorted(groups):
        residual = StateVector(groups[det_config])
        prob = residual.norm() ** 2
        if prob <= 0.0:
            continue
        counts: dict[str, int] = {p: 0 for p in detected_ports}
        for mode, n in det_config:
            counts[mode.port] += n
        branches.append(MeasurementBranch(tuple(sorted(counts.items())), prob, residual))
    return branches


def _outcome_options(det: DetectorSpec, n: int) -> list[tuple[int, float]]:
    """Possible reported outcomes and probabilities for n photons at one detector."""
    eta = det.efficiency
    if det.mode == THRESHOLD:
        if n == 0:
            return [(0, 1.0)]
        if eta >= 1.0:
            return [(1, 1.0)]
        miss = (1.0 - eta) ** n
        return [(1, 1.0 - miss), (0, miss)]
    if eta >= 1.0:
        return [(n, 1.0)]
    return [(k, math.comb(n, k) * eta ** k * (1.0 - eta) ** (n - k))
            for k in range(n + 1)]


@dataclass
class OutcomeRow:
    pattern: DetectionPattern
    probability: float
    residual_branches: list[tuple[float, StateVector]]   # (weight, normalized residual)

    @property
    def residual(self) -> StateVector | None:
        """The conditional residual state, or None when it is a genuine mixture."""
        if not self.residual_branches:
            return None
        first = self.residual_branches[0][1]
        for _, other in self.residual_branches[1:]:
            if abs(abs(first.inner_product(other)) - 1.0) > _PARALLEL_TOL:
                return None
        return first


def outcome_distribution(state: StateVector,
                         detectors: list[DetectorSpec]) -> list[OutcomeRow]:
    """Probabilities over exhaustive detection patterns, with conditional residuals.

    When the input state has squared norm below 1 (photons absorbed upstream),
    the missing mass is reported under the reserved ``lost`` pseudo-pattern so
    the rows still sum to 1.
    """
    by_pattern: dict[DetectionPattern, OutcomeRow] = {}
    total = 0.0
    for branch in measure(state, detectors):
        counts = dict(branch.port_counts)
        combos: list[tuple[dict[str, int], float]] = [({}, 1.0)]
        for det in detectors:
            options = _outcome_options(det, counts.get(det.port, 0))
            combos = [(dict(acc, **{det.name: v}), ap * p)
                      for acc, ap in combos for v, p in options if p > 0.0]
        residual_unit = None
        for outcome_map, thin in combos:
            prob = branch.probability * thin
            if prob <= 0.0:
                continue
            pattern = DetectionPattern.from_dict(outcome_map)
            row = by_pattern.get(pattern)
            if row is None:
                row = OutcomeRow(pattern, 0.0, [])
                by_pattern[pattern] = row
            row.probability += prob
            total += prob
            if residual_unit is None:
                residual_unit = branch.residual.scaled(1.0 / math.sqrt(branch.probability))
            row.residual_branches.append((prob, residual_unit))

    rows = sorted(by_pattern.values(), key=lambda r: str(r.pattern))
    lost_mass = 1.0 - total
    if lost_mass > 1e-12:
        rows.append(OutcomeRow(LOST, lost_mass, []))
    return rows


def postselect(state: StateVector, detectors: list[DetectorSpec],
               pattern: DetectionPattern) -> tuple[StateVector, float]:
    """Conditional residual state and probability for one detection pattern.

    Raises ImpossiblePatternError below the 1e-14 probability floor and
    ValueError when the conditional state is a mixture (use measure/
    outcome_distribution for branch-level access in that case).
    """
    for row in outcome_distribution(state, detectors):
        if row.pattern == pattern:
            if row.probability < IMPOSSIBLE_PROB:
                break
            residual = row.residual
            if residual is None:
                raise ValueError(
                    f"conditional state for {pattern} is mixed; inspect branches instead")
            return residual, row.probability
    raise ImpossiblePatternError(f"pattern {pattern} has no probability mass")


def exactly_one_photon(detector_name: str) -> DetectionPattern:
    """Convenience pattern for single-detector, one-photon post-selection."""
    return DetectionPattern.from_dict({detector_name: 1})
