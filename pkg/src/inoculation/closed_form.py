"""Closed-form equilibria for complete graphs and stars.

Both topologies are symmetric enough that a profile is determined, up to
relabelling, by a couple of integers (number of insecure players, and for
stars whether the center is secure). Equilibrium membership for each class
is an explicit inequality in those integers, so no enumeration is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .game import InadmissibleError, Model, admissible, parse_rational


@dataclass(frozen=True)
class Entry:
    label: str
    insecure: int
    cost: Fraction
    center_secure: bool | None = None


@dataclass
class ClosedFormResult:
    topology: str
    n: int
    C: Fraction
    L: Fraction
    F: Fraction
    model: Model
    ne: list[Entry]
    fne: list[Entry]
    opt: list[Entry]
    unique_fne: bool | None = None
    min_unstable_n0: int | None = None
    formula_fne: list[Entry] = field(default_factory=list)
    findings: list[str] = field(default_factory=list)

    @property
    def ne_costs(self) -> set[Fraction]:
        return {e.cost for e in self.ne}

    @property
    def fne_costs(self) -> set[Fraction]:
        return {e.cost for e in self.fne}

    @property
    def opt_cost(self) -> Fraction:
        return min(e.cost for e in self.opt)

    @property
    def worst_ne(self) -> Fraction:
        return max(self.ne_costs)

    @property
    def worst_fne(self) -> Fraction:
        return max(self.fne_costs)

    @property
    def wof(self) -> Fraction:
        return self.worst_ne / self.worst_fne


def _validate(n, C, L, F):
    C, L, F = parse_rational(C), parse_rational(L), parse_rational(F)
    if n < 2:
        raise InadmissibleError("need n >= 2")
    if not admissible(n, C, L):
        raise InadmissibleError(f"need L/n < C <= L, got C={C}, L={L}, n={n}")
    if not 0 <= F <= 1:
        raise InadmissibleError(f"friendship factor must lie in [0, 1], got {F}")
    return C, L, F


def _ceil(x: Fraction) -> int:
    return -(-x.numerator // x.denominator)


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


# ---------------------------------------------------------------------------
# Complete graph

def _clique_cost(n, C, L, k):
    return (n - k) * C + Fraction(k * k) * L / n


def _clique_range(ratio: Fraction, F: Fraction) -> range:
    lo = _ceil((ratio - 1) / (1 + F))
    hi = _floor((ratio + F) / (1 + F))
    return range(lo, hi + 1)


def closed_form_complete(n: int, C, L, F=0, model: Model | str = Model.ABSOLUTE) -> ClosedFormResult:
    """Equilibria of K_n, keyed by the number ``k`` of insecure players.

    Selfish equilibria have ``ceil(Cn/L) - 1 <= k <= floor(Cn/L)``; with
    friendship ``ceil((Cn/L - 1)/(1+F)) <= k <= floor((Cn/L + F)/(1+F))``.
    In the relative model every player has ``n - 1`` friends, so F is scaled
    by ``1/(n-1)``.
    """
    C, L, F = _validate(n, C, L, F)
    model = Model(model)
    ratio = C * n / L
    f_eff = Fraction(0) if model is Model.SELFISH else F
    if model is Model.RELATIVE:
        f_eff /= n - 1
    ne = [Entry("NE", k, _clique_cost(n, C, L, k)) for k in _clique_range(ratio, Fraction(0))]
    fne = [Entry("FNE", k, _clique_cost(n, C, L, k)) for k in _clique_range(ratio, f_eff)]
    half = ratio / 2
    opt = [Entry("OPT", k, _clique_cost(n, C, L, k)) for k in sorted({_floor(half), _ceil(half)})]
    return ClosedFormResult("complete", n, C, L, F, model, ne, fne, opt)


# ---------------------------------------------------------------------------
# Star (center 0)

def _star_cost(n, C, L, x):
    """Center insecure with ``x`` insecure leaves."""
    return (n - 1 - x) * C + Fraction((x + 1) ** 2) * L / n


def _center_threshold(ratio: Fraction, f_center: Fraction, n: int) -> int:
    """Smallest ``n0`` for which an insecure center with ``n0`` insecure leaves inoculates.

    The center inoculates iff ``f*n0^2 + n0 + 1 > Cn/L``; searched over
    integers so boundary cases stay exact.
    """
    n0 = 0
    while n0 < n and f_center * n0 * n0 + n0 + 1 <= ratio:
        n0 += 1
    return n0


def _star_center_insecure(n, C, L, f_leaf, f_center) -> list[Entry]:
    ratio = C * n / L
    n0_min = _center_threshold(ratio, f_center, n)
    out = []
    for x in range(n):
        insecure_leaves_stay = x == 0 or x + 1 + f_leaf <= ratio
        secure_leaves_stay = x == n - 1 or ratio <= x + 2 + f_leaf
        if insecure_leaves_stay and secure_leaves_stay and x < n0_min:
            out.append(Entry("center-insecure", x + 1, _star_cost(n, C, L, x), False))
    return out


def _formula_star_fne(n, C, L, F) -> list[Entry]:
    """The three textbook FNE cost formulas for stars, without the center check."""
    ratio = C * n / L
    first = Entry("FNE1", n - 1, C + (n - 1) * L / n, True)
    out = [first]
    k2 = _ceil(ratio - F) - 1
    k3 = _floor(ratio - F)
    for label, k in (("FNE2", k2), ("FNE3", k3)):
        if 1 <= k <= n:
            out.append(Entry(label, k, (n - k) * C + Fraction(k * k) * L / n, False))
    return out


def closed_form_star(n: int, C, L, F=0, model: Model | str = Model.ABSOLUTE) -> ClosedFormResult:
    """Equilibria of the star S_n.

    The center-secure profile with all leaves insecure is always an
    equilibrium and is the social optimum. Any other equilibrium has an
    insecure center and ``x`` insecure leaves, where ``x`` must satisfy

    * insecure leaves stay: ``x + 1 + F <= Cn/L`` (vacuous if ``x = 0``),
    * secure leaves stay: ``Cn/L <= x + 2 + F`` (vacuous if ``x = n - 1``),
    * the center stays: ``x < n0_min`` from :func:`_center_threshold`.

    Leaves have a single friend, so both friendship models agree for them;
    the center's F is divided by ``n - 1`` in the relative model.
    """
    C, L, F = _validate(n, C, L, F)
    model = Model(model)
    f_leaf = Fraction(0) if model is Model.SELFISH else F
    f_center = f_leaf / (n - 1) if model is Model.RELATIVE else f_leaf
    opt_cost = C + (n - 1) * L / n
    good = Entry("center-secure", n - 1, opt_cost, True)

    ne = [good] + _star_center_insecure(n, C, L, Fraction(0), Fraction(0))
    fne = [good] + _star_center_insecure(n, C, L, f_leaf, f_center)
    ratio = C * n / L
    n0_min = _center_threshold(ratio, f_center, n)
    res = ClosedFormResult("star", n, C, L, F, model, ne, fne,
                           [Entry("OPT", n - 1, opt_cost, True)],
                           unique_fne=len(fne) == 1, min_unstable_n0=n0_min)
    if model is Model.ABSOLUTE:
        res.formula_fne = _formula_star_fne(n, C, L, F)
        literal = {e.cost for e in res.formula_fne}
        if literal != res.fne_costs:
            res.findings.append(
                f"formula FNE costs {sorted(literal)}, exact analysis gives "
                f"{sorted(res.fne_costs)}")
        formula_unique = n0_min <= _floor(ratio - F) - 1
        if formula_unique != res.unique_fne:
            res.findings.append(
                f"uniqueness condition (n0_min={n0_min}) says unique={formula_unique}, "
                f"exact analysis says unique={res.unique_fne}")
    elif model is Model.RELATIVE:
        # the strict relative-star inequalities, which treat the insecure
        # leaves as one friend of the center
        strict = any(
            x + 1 + F / (n - 1) < ratio and (x == 0 or x + 1 + F < ratio)
            and (x == n - 1 or ratio <= x + 2 + F)
            for x in range(n))
        if strict != (len(fne) > 1):
            res.findings.append(
                f"strict relative star inequalities say center-insecure rFNE exists={strict}, "
                f"exact analysis says {len(fne) > 1}")
    return res


def unique_condition_float(n: int, C, L, F) -> bool:
    """The floor-of-square-root uniqueness condition evaluated in floating point.

    Kept only for comparison against the exact integer search.
    """
    C, L, F = _validate(n, C, L, F)
    if F == 0:
        raise ValueError("condition is undefined for F = 0")
    r = float(C * n / L)
    f = float(F)
    root = (math.sqrt(1 - 4 * f * (1 - r)) - 1) / (2 * f)
    return math.floor(r - f) - math.floor(root) - 2 >= 0


def star_wof_bound(n: int, C, L, F) -> tuple[str, Fraction]:
    """Which windfall bound applies to S_n and its value.

    Returns ``("lower", b)`` when the friendship equilibrium is unique
    (windfall at least ``b``), else ``("upper", (n+1)/(n-3))``.
    """
    C, L, F = _validate(n, C, L, F)
    res = closed_form_star(n, C, L, F)
    if res.unique_fne:
        return "lower", ((n - 2) * C + L / n) / (C + (n - 1) * L / n)
    return "upper", Fraction(n + 1, n - 3)
