"""Best-response dynamics, convergence bookkeeping and the cycle potential.

Terminology: a *round* offers one player a best response; a *pass* sweeps
the whole schedule once. A run converges after a pass without changes.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .equilibria import is_equilibrium
from .game import (GameInstance, InadmissibleError, Model, StrategyProfile,
                   format_rational, perceived_cost)
from .graph import attack_components


class ScheduleKind(str, enum.Enum):
    ROUND_ROBIN = "round_robin"
    RANDOM = "random_permutation_per_round"
    FIXED = "fixed_sequence"


@dataclass(frozen=True)
class Schedule:
    kind: ScheduleKind = ScheduleKind.ROUND_ROBIN
    seed: int = 0
    sequence: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", ScheduleKind(self.kind))
        object.__setattr__(self, "sequence", tuple(self.sequence))
        if self.kind is ScheduleKind.FIXED and not self.sequence:
            raise ValueError("fixed schedule needs a nonempty sequence")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> Schedule:
        """``round-robin``, ``random`` or ``fixed:<id,id,...>``."""
        if text in ("round-robin", "round_robin"):
            return cls(ScheduleKind.ROUND_ROBIN)
        if text == "random":
            return cls(ScheduleKind.RANDOM, seed=seed)
        if text.startswith("fixed:"):
            ids = tuple(int(t) for t in text[6:].split(",") if t.strip())
            return cls(ScheduleKind.FIXED, sequence=ids)
        raise ValueError(f"unknown schedule {text!r}")

    def passes(self, n: int):
        """Yield the node order of each successive pass."""
        if any(not 0 <= i < n for i in self.sequence):
            raise ValueError("fixed schedule references a node outside the graph")
        if self.kind is ScheduleKind.ROUND_ROBIN:
            order = list(range(n))
            while True:
                yield order
        elif self.kind is ScheduleKind.RANDOM:
            rng = np.random.default_rng(self.seed)
            while True:
                yield rng.permutation(n).tolist()
        else:
            while True:
                yield list(self.sequence)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind is ScheduleKind.RANDOM:
            d["seed"] = self.seed
        if self.kind is ScheduleKind.FIXED:
            d["sequence"] = list(self.sequence)
        return d


@dataclass(frozen=True)
class ChangeEvent:
    pass_index: int
    round_index: int
    node: int
    old: bool
    new: bool
    cost_before: Fraction | None = None
    cost_after: Fraction | None = None
    phi: int | None = None


@dataclass
class DynamicsTrace:
    initial: StrategyProfile
    final: StrategyProfile
    events: list[ChangeEvent]
    converged: bool
    passes: int
    rounds: int
    schedule: Schedule = field(default_factory=Schedule)
    instance: dict = field(default_factory=dict)
    initial_phi: int | None = None

    @property
    def changes(self) -> int:
        return len(self.events)

    def to_dict(self) -> dict:
        d = {
            "instance": self.instance,
            "schedule": self.schedule.to_dict(),
            "events": [{"pass": e.pass_index, "node": e.node, "from": int(e.old), "to": int(e.new)}
                       for e in self.events],
            "final": str(self.final),
            "converged": self.converged,
            "passes": self.passes,
            "changes": self.changes,
        }
        if self.initial_phi is not None:
            d["potential"] = [self.initial_phi] + [e.phi for e in self.events]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _summary(inst: GameInstance) -> dict:
    return {"n": inst.n, "edges": inst.graph.edge_count, "C": format_rational(inst.C),
            "L": format_rational(inst.L), "F": format_rational(inst.F),
            "model": inst.model.value}


def run_dynamics(inst: GameInstance, initial: StrategyProfile, schedule: Schedule | None = None,
                 max_passes: int | None = None, potential: PotentialConfig | None = None,
                 record_costs: bool = True, backend=None) -> DynamicsTrace:
    """Offer best responses along ``schedule`` until a pass makes no change.

    Gives up after ``max_passes`` passes (default ``100 * n``) and reports
    ``converged=False``. With a ``potential`` config (cycles only) every event
    carries the potential after the change.
    """
    schedule = schedule or Schedule()
    n = inst.n
    if len(initial) != n:
        raise ValueError("initial profile length does not match graph")
    max_passes = 100 * n if max_passes is None else max_passes
    if max_passes < 1:
        raise ValueError("max_passes must be >= 1")
    if potential is not None:
        potential.threshold(inst)  # validates before running

    kernel = inst.kernel(backend)
    ip, ix = inst.graph.csr
    stepper = kernel.Stepper(ip, ix, [int(b) for b in initial.bits], *inst.weights, inst.relative)
    bits = list(initial.bits)
    events: list[ChangeEvent] = []
    rounds = 0
    passes = 0
    converged = False
    initial_phi = cycle_potential(inst, initial, potential) if potential else None

    for order in schedule.passes(n):
        if passes >= max_passes:
            break
        passes += 1
        changed = False
        for i in order:
            rounds += 1
            if not stepper.wants_flip(i):
                continue
            before = after = None
            if record_costs:
                before = perceived_cost(inst, StrategyProfile(bits), i)
            stepper.flip(i)
            bits[i] = not bits[i]
            changed = True
            profile = None
            if record_costs or potential:
                profile = StrategyProfile(bits)
            if record_costs:
                after = perceived_cost(inst, profile, i)
            phi = cycle_potential(inst, profile, potential) if potential else None
            events.append(ChangeEvent(passes - 1, rounds - 1, i, not bits[i], bits[i],
                                      before, after, phi))
        if not changed:
            final = StrategyProfile(bits)
            converged = schedule.kind is not ScheduleKind.FIXED or is_equilibrium(inst, final)[0]
            break

    return DynamicsTrace(initial, StrategyProfile(bits), events, converged, passes, rounds,
                         schedule, _summary(inst), initial_phi)


def convergence_stats(trace: DynamicsTrace) -> tuple[int, int, bool]:
    """``(passes, changes, converged)``."""
    return trace.passes, trace.changes, trace.converged


def random_profile(n: int, seed: int) -> StrategyProfile:
    rng = np.random.default_rng(seed)
    return StrategyProfile(tuple(bool(b) for b in rng.integers(0, 2, n)))


def parse_initial(text: str, n: int, seed: int = 0) -> StrategyProfile:
    """``all-insecure``, ``all-secure``, ``random`` or ``bits:<01-string>``."""
    if text == "all-insecure":
        return StrategyProfile.all_insecure(n)
    if text == "all-secure":
        return StrategyProfile.all_secure(n)
    if text == "random":
        return random_profile(n, seed)
    if text.startswith("bits:"):
        a = StrategyProfile.from_string(text[5:])
        if len(a) != n:
            raise ValueError(f"initial profile has {len(a)} bits, graph has {n} nodes")
        return a
    raise ValueError(f"unknown initial profile rule {text!r}")


# ---------------------------------------------------------------------------
# Cycle potential

class ThresholdVariant(str, enum.Enum):
    LITERAL = "literal"
    REDERIVED = "rederived"


@dataclass(frozen=True)
class PotentialConfig:
    """Big/small threshold choice for the cycle potential.

    ``literal`` uses the closed forms ``nC/(FL) - L/F + 1`` (absolute) and
    ``2Cn/(FL) - 2L/F + 1`` (relative). ``rederived`` solves the indifference
    of a player with two insecure neighbours directly, which gives
    ``(Cn/L - F)/(1 + F)`` and ``(2Cn/L - F)/(2 + F)``; only the latter passes
    the audit in :func:`audit_potential`.
    """

    variant: ThresholdVariant = ThresholdVariant.REDERIVED

    def __post_init__(self):
        object.__setattr__(self, "variant", ThresholdVariant(self.variant))

    def threshold(self, inst: GameInstance) -> Fraction:
        F = inst.friendship
        if F == 0:
            raise InadmissibleError("potential threshold undefined for F = 0")
        C, L, n = inst.C, inst.L, inst.n
        relative = inst.model is Model.RELATIVE
        if self.variant is ThresholdVariant.LITERAL:
            if relative:
                return 2 * C * n / (F * L) - 2 * L / F + 1
            return n * C / (F * L) - L / F + 1
        if relative:
            return (2 * C * n / L - F) / (2 + F)
        return (C * n / L - F) / (1 + F)


def cycle_potential(inst: GameInstance, a: StrategyProfile, cfg: PotentialConfig) -> int:
    """Sum of big component sizes minus sum of small ones (big means size > t)."""
    if not inst.graph.is_cycle():
        raise InadmissibleError("the potential is defined on cycle graphs only")
    t = cfg.threshold(inst)
    sizes = attack_components(inst.graph, a).component_size
    return sum(s if s > t else -s for s in sizes)


@dataclass
class AuditResult:
    counts: dict[str, int]
    violations: list[tuple[int, str, int]]

    @property
    def ok(self) -> bool:
        return not self.violations


def audit_potential(inst: GameInstance, trace: DynamicsTrace, cfg: PotentialConfig,
                    warmup_passes: int = 2) -> AuditResult:
    """Check the potential's per-case behaviour on events after the warm-up passes.

    Case A (secure, both neighbours insecure, becomes insecure) and case C
    (insecure, both neighbours insecure, becomes secure) must lower the
    potential by at least one; case B (secure with exactly one secure
    neighbour becomes insecure) may raise it by at most one. Any other kind
    of change after the warm-up is recorded as a violation too.
    Violations are ``(event index, case, delta)``.
    """
    g = inst.graph
    if not g.is_cycle():
        raise InadmissibleError("the potential is defined on cycle graphs only")
    bits = list(trace.initial.bits)
    phi = cycle_potential(inst, trace.initial, cfg)
    counts = {"A": 0, "B": 0, "C": 0, "other": 0}
    violations = []
    for idx, e in enumerate(trace.events):
        left, right = g.neighbors(e.node)
        insecure_nbrs = (not bits[left]) + (not bits[right])
        bits[e.node] = e.new
        new_phi = cycle_potential(inst, StrategyProfile(bits), cfg)
        delta = new_phi - phi
        phi = new_phi
        if e.pass_index < warmup_passes:
            continue
        if e.old and insecure_nbrs == 2:
            case, ok = "A", delta <= -1
        elif e.old and insecure_nbrs == 1:
            case, ok = "B", delta <= 1
        elif not e.old and insecure_nbrs == 2:
            case, ok = "C", delta <= -1
        else:
            case, ok = "other", False
        counts[case] += 1
        if not ok:
            violations.append((idx, case, delta))
    return AuditResult(counts, violations)
