"""Circuit graphs, qubit preparations, closed-form XOR results, and builders.

A circuit is an ordered stage list wired by named spatial ports, one optional
coincidence requirement, and an optional scan declaration. Stages are plain
frozen dataclasses so graphs compare structurally and serialize canonically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import ClassVar

from .detect import CoincidenceSpec, DetectorSpec, THRESHOLD, NUMBER
from .distinguishability import OverlapModel
from .sources import CoherentSource, IdealSource, SourceSpec, SpdcPairSource, source_ports

VANISHING_TOL = 1e-14


class VanishingOutputError(ValueError):
    """The post-selected gate output has (numerically) zero amplitude."""


@dataclass(frozen=True)
class QubitPrep:
    """Linear polarization preparation at angle_deg from |0>."""

    angle_deg: float = 0.0

    @property
    def amplitudes(self) -> tuple[float, float]:
        a = math.radians(self.angle_deg)
        return math.cos(a), math.sin(a)


@dataclass(frozen=True)
class QubitState:
    """Single polarization qubit, amplitudes over (|0>, |1>)."""

    amp0: complex
    amp1: complex

    def normalized(self) -> "QubitState":
        n = math.sqrt(abs(self.amp0) ** 2 + abs(self.amp1) ** 2)
        if n == 0.0:
            raise VanishingOutputError("cannot normalize zero qubit state")
        return QubitState(self.amp0 / n, self.amp1 / n)

    def fidelity(self, other: "QubitState") -> float:
        a = self.normalized()
        b = other.normalized()
        return abs(a.amp0.conjugate() * b.amp0 + a.amp1.conjugate() * b.amp1) ** 2


# -- stages -------------------------------------------------------------

@dataclass(frozen=True)
class PortDecl:
    port: str


@dataclass(frozen=True)
class SourceStage:
    source: SourceSpec


@dataclass(frozen=True)
class OverlapDecl:
    tag_a: str
    tag_b: str
    factor: float


@dataclass(frozen=True)
class HwpStage:
    port: str
    angle_deg: float


@dataclass(frozen=True)
class RotateStage:
    port: str
    angle_deg: float


@dataclass(frozen=True)
class PbsStage:
    port_a: str
    port_b: str


@dataclass(frozen=True)
class AnalyzerStage:
    port: str
    angle_deg: float


@dataclass(frozen=True)
class DelayStage:
    port: str
    dt: float


@dataclass(frozen=True)
class DetectorStage:
    spec: DetectorSpec


@dataclass(frozen=True)
class OutputDecl:
    port: str


Stage = (PortDecl | SourceStage | OverlapDecl | HwpStage | RotateStage | PbsStage
         | AnalyzerStage | DelayStage | DetectorStage | OutputDecl)


@dataclass(frozen=True)
class ScanSpec:
    """Parameter sweep over one delay or one analyzer angle in the graph."""

    kind: str            # "delay" or "analyzer"
    port: str
    start: float
    stop: float
    steps: int

    def values(self) -> list[float]:
        if self.steps == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.steps - 1)
        return [self.start + i * step for i in range(self.steps)]


@dataclass(frozen=True)
class CircuitGraph:
    stages: tuple[Stage, ...]
    coincidence: CoincidenceSpec | None = None
    scan: ScanSpec | None = None

    # -- derived views ---------------------------------------------------

    def sources(self) -> list[SourceSpec]:
        return [s.source for s in self.stages if isinstance(s, SourceStage)]

    def detectors(self) -> list[DetectorSpec]:
        return [s.spec for s in self.stages if isinstance(s, DetectorStage)]

    def output_ports(self) -> list[str]:
        return [s.port for s in self.stages if isinstance(s, OutputDecl)]

    def declared_ports(self) -> list[str]:
        ports: list[str] = []
        for s in self.stages:
            if isinstance(s, PortDecl):
                ports.append(s.port)
            elif isinstance(s, SourceStage):
                ports.extend(source_ports(s.source))
        return ports

    def overlap_model(self) -> OverlapModel:
        factors = {frozenset((s.tag_a, s.tag_b)): s.factor
                   for s in self.stages if isinstance(s, OverlapDecl)}
        return OverlapModel(pair_factors=factors)

    def delay_on(self, port: str) -> float:
        return sum(s.dt for s in self.stages if isinstance(s, DelayStage) and s.port == port)

    def _replace_stage(self, kind: str, port: str, value: float) -> "CircuitGraph":
        stages = []
        done = False
        for s in self.stages:
            if not done and kind == "delay" and isinstance(s, DelayStage) and s.port == port:
                s = replace(s, dt=value)
                done = True
            elif not done and kind == "analyzer" \
                    and isinstance(s, AnalyzerStage) and s.port == port:
                s = replace(s, angle_deg=value)
                done = True
            stages.append(s)
        if not done:
            raise ValueError(f"no {kind} stage on port {port!r}")
        return replace(self, stages=tuple(stages))

    def with_delay(self, port: str, dt: float) -> "CircuitGraph":
        return self._replace_stage("delay", port, dt)

    def with_analyzer_angle(self, port: str, angle_deg: float) -> "CircuitGraph":
        return self._replace_stage("analyzer", port, angle_deg)

    def with_scan_value(self, value: float) -> "CircuitGraph":
        """Copy of the graph with the scanned stage parameter replaced."""
        if self.scan is None:
            raise ValueError("graph has no scan declaration")
        return self._replace_stage(self.scan.kind, self.scan.port, value)


# -- closed-form gate results --------------------------------------------

def xor_conditional_output(a: complex, b: complex, g: complex, d: complex) -> QubitState:
    """Normalized post-selected XOR output for input amplitudes over |00..11>."""
    c0 = a + d
    c1 = b + g
    if abs(c0) ** 2 + abs(c1) ** 2 < VANISHING_TOL:
        raise VanishingOutputError("gate output amplitude vanishes for this input")
    return QubitState(c0, c1).normalized()


def xor_success_probability(a: complex, b: complex, g: complex, d: complex) -> float:
    """Success probability of the post-selected XOR for a unit-norm input."""
    return 0.25 * (abs(a + d) ** 2 + abs(b + g) ** 2)


# -- builders -------------------------------------------------------------

@dataclass(frozen=True)
class PhysicsParams:
    """Distinguishability and source knobs shared by the circuit builders.

    v12 scales the overlap of the two down-conversion photons; kappa scales
    their overlap with the pump-derived photon. With mu or pair_prob nonzero
    the realistic pair + attenuated-pulse sources replace the ideal ones.
    """

    v12: float = 1.0
    kappa: float = 1.0
    sigma: float = 1.0
    mu: float = 0.0
    pair_prob: float = 0.0
    birefringence_deg: float = 0.0

    TAG1: ClassVar[str] = "spdc1"
    TAG2: ClassVar[str] = "spdc2"
    TAG3: ClassVar[str] = "pump"

    def overlap_stages(self) -> list[OverlapDecl]:
        decls = []
        if self.v12 != 1.0:
            decls.append(OverlapDecl(self.TAG1, self.TAG2, self.v12))
        if self.kappa != 1.0:
            decls.append(OverlapDecl(self.TAG1, self.TAG3, self.kappa))
            decls.append(OverlapDecl(self.TAG2, self.TAG3, self.kappa))
        return decls

    def realistic(self) -> bool:
        return self.mu > 0.0 or self.pair_prob > 0.0


def _input_sources(physics: PhysicsParams) -> list[SourceStage]:
    if physics.realistic():
        return [
            SourceStage(SpdcPairSource("q1", "q2", pair_prob=physics.pair_prob,
                                       sigma=physics.sigma,
                                       tag1=physics.TAG1, tag2=physics.TAG2)),
            SourceStage(CoherentSource("q3", mean_photon=physics.mu,
                                       sigma=physics.sigma, tag=physics.TAG3)),
        ]
    return [
        SourceStage(IdealSource("q1", sigma=physics.sigma, tag=physics.TAG1)),
        SourceStage(IdealSource("q2", sigma=physics.sigma, tag=physics.TAG2)),
        SourceStage(IdealSource("q3", sigma=physics.sigma, tag=physics.TAG3)),
    ]


def build_xor_circuit(prep_a: QubitPrep, prep_b: QubitPrep,
                      detector_mode: str = NUMBER) -> CircuitGraph:
    """Single post-selected XOR gate: two inputs, gate detector, open output port."""
    stages: tuple[Stage, ...] = (
        SourceStage(IdealSource("a")),
        SourceStage(IdealSource("b")),
        HwpStage("a", prep_a.angle_deg / 2.0),
        HwpStage("b", prep_b.angle_deg / 2.0),
        PbsStage("a", "b"),
        AnalyzerStage("b", 0.0),
        DetectorStage(DetectorSpec("D1", "b", mode=detector_mode)),
        OutputDecl("a"),
    )
    return CircuitGraph(stages, CoincidenceSpec(("D1",)))


def build_parity_circuit(prep1: QubitPrep = QubitPrep(), prep2: QubitPrep = QubitPrep(),
                         prep3: QubitPrep = QubitPrep(),
                         physics: PhysicsParams = PhysicsParams(),
                         theta3_deg: float = 0.0) -> CircuitGraph:
    """Two cascaded XOR gates computing the parity of three input qubits.

    Layout: wave plates prepare the inputs, the first gate joins q1 and q2
    with its analyzer and detector on q2, the fiber link (optional residual
    birefringence) carries the intermediate result on q1 to the second gate
    with q3, and the output analyzer plus detector sit on q1. Acceptance is a
    threefold coincidence of D1, D2, D3.
    """
    stages: list[Stage] = list(_input_sources(physics))
    stages.extend(physics.overlap_stages())
    stages.extend([
        HwpStage("q1", prep1.angle_deg / 2.0),
        HwpStage("q2", prep2.angle_deg / 2.0),
        HwpStage("q3", prep3.angle_deg / 2.0),
        DelayStage("q3", 0.0),
        PbsStage("q1", "q2"),
        AnalyzerStage("q2", 0.0),
        DetectorStage(DetectorSpec("D1", "q2", mode=THRESHOLD)),
        RotateStage("q1", physics.birefringence_deg),
        PbsStage("q1", "q3"),
        AnalyzerStage("q3", 0.0),
        DetectorStage(DetectorSpec("D2", "q3", mode=THRESHOLD)),
        AnalyzerStage("q1", theta3_deg),
        DetectorStage(DetectorSpec("D3", "q1", mode=THRESHOLD)),
    ])
    return CircuitGraph(tuple(stages), CoincidenceSpec(("D1", "D2", "D3")))


def build_xor1_hom_circuit(physics: PhysicsParams = PhysicsParams(),
                           delay1: float = 0.0) -> CircuitGraph:
    """First gate probed alone: third input blocked, later analyzers removed.

    A 45 degree fiber rotation before the second beam splitter routes the
    gate's |0> output to D3 (transmitted) and its |1> output to D2
    (reflected), so two-fold coincidences read out the logical result.
    """
    stages: tuple[Stage, ...] = tuple(
        [SourceStage(IdealSource("q1", sigma=physics.sigma, tag=physics.TAG1)),
         SourceStage(IdealSource("q2", sigma=physics.sigma, tag=physics.TAG2)),
         PortDecl("q3")]
        + physics.overlap_stages()
        + [HwpStage("q1", 0.0),
           HwpStage("q2", 0.0),
           DelayStage("q1", delay1),
           PbsStage("q1", "q2"),
           AnalyzerStage("q2", 0.0),
           DetectorStage(DetectorSpec("D1", "q2", mode=THRESHOLD)),
           RotateStage("q1", 45.0),
           PbsStage("q1", "q3"),
           DetectorStage(DetectorSpec("D2", "q3", mode=THRESHOLD)),
           DetectorStage(DetectorSpec("D3", "q1", mode=THRESHOLD))])
    return CircuitGraph(stages, CoincidenceSpec(("D1",)),
                        ScanSpec("delay", "q1", -4.0, 4.0, 41))
