"""Game instances, exact cost evaluation and single-player best responses.

Everything in this module works on :class:`fractions.Fraction`; it is the
slow, obviously-correct route. The kernels in :mod:`inoculation._core` are
checked against it.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property

from . import _core
from .graph import ComponentView, Graph, attack_components


class InadmissibleError(ValueError):
    """Parameters outside the game's admissible regime."""


class Model(str, enum.Enum):
    SELFISH = "selfish"
    ABSOLUTE = "absolute"
    RELATIVE = "relative"

    def __str__(self):
        return self.value


def parse_rational(text) -> Fraction:
    """Parse ``p/q``, an integer or a finite decimal into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("pass rationals as strings or Fractions, not floats")
    try:
        value = Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc
    return value


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class StrategyProfile:
    """Inoculation bits; ``bits[i]`` is True when player ``i`` is secure."""

    bits: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(bool(b) for b in self.bits))

    @classmethod
    def all_secure(cls, n: int) -> StrategyProfile:
        return cls((True,) * n)

    @classmethod
    def all_insecure(cls, n: int) -> StrategyProfile:
        return cls((False,) * n)

    @classmethod
    def from_string(cls, s: str) -> StrategyProfile:
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"profile must be a nonempty 0/1 string, got {s!r}")
        return cls(tuple(c == "1" for c in s))

    @classmethod
    def from_mask(cls, mask: int, n: int) -> StrategyProfile:
        return cls(tuple(bool(mask >> i & 1) for i in range(n)))

    @classmethod
    def from_secure(cls, n: int, secure) -> StrategyProfile:
        secure = set(secure)
        return cls(tuple(i in secure for i in range(n)))

    def __len__(self):
        return len(self.bits)

    def __getitem__(self, i):
        return self.bits[i]

    def __str__(self):
        return "".join("1" if b else "0" for b in self.bits)

    @property
    def mask(self) -> int:
        return sum(1 << i for i, b in enumerate(self.bits) if b)

    @property
    def secure(self) -> frozenset[int]:
        return frozenset(i for i, b in enumerate(self.bits) if b)

    @property
    def insecure(self) -> frozenset[int]:
        return frozenset(i for i, b in enumerate(self.bits) if not b)

    @property
    def num_secure(self) -> int:
        return sum(self.bits)

    def flipped(self, i: int) -> StrategyProfile:
        bits = list(self.bits)
        bits[i] = not bits[i]
        return StrategyProfile(tuple(bits))


def admissible(n: int, C, L) -> bool:
    C, L = Fraction(C), Fraction(L)
    return L > 0 and L / n < C <= L


@dataclass(frozen=True)
class GameInstance:
    graph: Graph
    C: Fraction
    L: Fraction
    F: Fraction = Fraction(0)
    model: Model = Model.ABSOLUTE
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "C", parse_rational(self.C))
        object.__setattr__(self, "L", parse_rational(self.L))
        object.__setattr__(self, "F", parse_rational(self.F))
        object.__setattr__(self, "model", Model(self.model))
        if not self.check:
            return
        n = self.graph.node_count
        if not admissible(n, self.C, self.L):
            raise InadmissibleError(
                f"need L/n < C <= L, got C={self.C}, L={self.L}, n={n}")
        if not 0 <= self.F <= 1:
            raise InadmissibleError(f"friendship factor must lie in [0, 1], got {self.F}")
        if self.model is Model.RELATIVE:
            isolated = [i for i in range(n) if self.graph.degree(i) == 0]
            if isolated:
                raise InadmissibleError(
                    f"relative model undefined on isolated nodes {isolated[:5]}")

    @property
    def n(self) -> int:
        return self.graph.node_count

    @property
    def friendship(self) -> Fraction:
        """F as the players actually use it; selfish players ignore the stored F."""
        return Fraction(0) if self.model is Model.SELFISH else self.F

    def with_F(self, F) -> GameInstance:
        return replace(self, F=parse_rational(F))

    def with_model(self, model) -> GameInstance:
        return replace(self, model=Model(model))

    def selfish(self) -> GameInstance:
        return replace(self, F=Fraction(0), model=Model.SELFISH)

    @cached_property
    def weights(self) -> tuple[int, int, int, int]:
        return _core.scaled_weights(self.n, self.C, self.L, self.friendship)

    @property
    def relative(self) -> bool:
        return self.model is Model.RELATIVE

    def kernel(self, preferred=None):
        return _core.pick_backend(self.n, self.weights, preferred)


@dataclass(frozen=True)
class CostReport:
    actual: tuple[Fraction, ...]
    perceived: tuple[Fraction, ...]
    social: Fraction


def _check_profile(inst: GameInstance, a: StrategyProfile) -> None:
    if len(a) != inst.n:
        raise ValueError(f"profile has {len(a)} entries, graph has {inst.n} nodes")


def actual_cost(inst: GameInstance, a: StrategyProfile, i: int,
                view: ComponentView | None = None) -> Fraction:
    if a[i]:
        return inst.C
    view = view or attack_components(inst.graph, a)
    return inst.L * view.size_of(i) / inst.n


def perceived_cost(inst: GameInstance, a: StrategyProfile, i: int,
                   view: ComponentView | None = None) -> Fraction:
    _check_profile(inst, a)
    view = view or attack_components(inst.graph, a)
    own = actual_cost(inst, a, i, view)
    F = inst.friendship
    if F == 0:
        return own
    nbrs = inst.graph.neighbors(i)
    friends = sum((actual_cost(inst, a, j, view) for j in nbrs), Fraction(0))
    if inst.model is Model.RELATIVE:
        if not nbrs:
            raise InadmissibleError(f"relative cost undefined for isolated node {i}")
        return own + F * friends / len(nbrs)
    return own + F * friends


def social_cost(inst: GameInstance, a: StrategyProfile) -> Fraction:
    _check_profile(inst, a)
    view = attack_components(inst.graph, a)
    n_sec = a.num_secure
    return n_sec * inst.C + inst.L * sum(k * k for k in view.component_size) / inst.n


def cost_report(inst: GameInstance, a: StrategyProfile) -> CostReport:
    _check_profile(inst, a)
    view = attack_components(inst.graph, a)
    actual = tuple(actual_cost(inst, a, i, view) for i in range(inst.n))
    perceived = tuple(perceived_cost(inst, a, i, view) for i in range(inst.n))
    return CostReport(actual, perceived, sum(actual, Fraction(0)))


def inoculation_threshold(inst: GameInstance, a: StrategyProfile, i: int) -> Fraction:
    """Component size above which player ``i`` prefers to inoculate.

    Neighbour component sizes are taken with ``i`` secure. The caller compares
    ``hypothetical_component_size`` strictly against the returned value.
    """
    _check_profile(inst, a)
    secured = a if a[i] else a.flipped(i)
    view = attack_components(inst.graph, secured)
    nbrs = inst.graph.neighbors(i)
    insecure = [j for j in nbrs if not secured[j]]
    ks = sum(view.size_of(j) for j in insecure)
    F = inst.friendship
    if inst.model is Model.RELATIVE:
        if not nbrs:
            raise InadmissibleError(f"relative threshold undefined for isolated node {i}")
        F = F / len(nbrs)
    return (inst.C * inst.n / inst.L + F * ks) / (1 + F * len(insecure))


def best_response(inst: GameInstance, a: StrategyProfile, i: int) -> tuple[bool, bool]:
    """Return ``(preferred strategy, strictly_improves)`` for player ``i``.

    The flip is preferred only on a strict decrease of perceived cost.
    """
    current = perceived_cost(inst, a, i)
    flipped = a.flipped(i)
    alternative = perceived_cost(inst, flipped, i)
    if alternative < current:
        return flipped[i], True
    return a[i], False

