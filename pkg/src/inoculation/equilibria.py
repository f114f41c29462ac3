"""Equilibrium verification, exhaustive enumeration, optimum, WoF and PoA."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import _core
from .game import GameInstance, Model, StrategyProfile, format_rational
from .graph import Graph

log = logging.getLogger(__name__)

DEFAULT_CAP = 20


class CapExceeded(ValueError):
    """Exhaustive search requested on a graph larger than the cap."""


@dataclass
class EquilibriumReport:
    instance: dict
    equilibria: list[tuple[StrategyProfile, Fraction]]
    optimum: tuple[StrategyProfile, Fraction] | None = None
    wof: Fraction | None = None
    poa: Fraction | None = None
    witnesses: dict[str, tuple[int, bool]] = field(default_factory=dict)

    @property
    def costs(self) -> list[Fraction]:
        return [c for _, c in self.equilibria]

    @property
    def best_cost(self) -> Fraction | None:
        return min(self.costs, default=None)

    @property
    def worst_cost(self) -> Fraction | None:
        return max(self.costs, default=None)

    def to_dict(self) -> dict:
        def num(x):
            if x is None:
                return None
            return {"exact": format_rational(x), "approx": float(x)}

        return {
            "instance": self.instance,
            "equilibria": [{"profile": str(p), "cost": num(c)} for p, c in self.equilibria],
            "count": len(self.equilibria),
            "best_cost": num(self.best_cost),
            "worst_cost": num(self.worst_cost),
            "optimum": None if self.optimum is None else
            {"profile": str(self.optimum[0]), "cost": num(self.optimum[1])},
            "wof": num(self.wof),
            "poa": num(self.poa),
            "witnesses": {k: {"node": v[0], "to": int(v[1])} for k, v in self.witnesses.items()},
        }


def instance_summary(inst: GameInstance) -> dict:
    return {
        "n": inst.n,
        "edges": inst.graph.edge_count,
        "C": format_rational(inst.C),
        "L": format_rational(inst.L),
        "F": format_rational(inst.F),
        "model": inst.model.value,
    }


def _bits(a: StrategyProfile) -> list[int]:
    return [1 if b else 0 for b in a.bits]


def is_equilibrium(inst: GameInstance, a: StrategyProfile,
                   backend=None) -> tuple[bool, tuple[int, bool] | None]:
    """True iff no player strictly lowers its perceived cost by flipping.

    Otherwise returns one improving deviation ``(node, new strategy)``.
    """
    if len(a) != inst.n:
        raise ValueError("profile length does not match graph")
    k = inst.kernel(backend)
    ip, ix = inst.graph.csr
    i = k.first_improving(ip, ix, _bits(a), *inst.weights, inst.relative)
    if i < 0:
        return True, None
    return False, (int(i), not a[i])


def _scan(args):
    backend_name, ip, ix, n, weights, relative, lo, hi = args
    k = _core.get_backend(backend_name)
    return k.enumerate_range(ip, ix, n, *weights, relative, lo, hi)


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise CapExceeded(
            f"exhaustive search over 2^{n} profiles exceeds cap {cap}; "
            "raise the cap explicitly or use a smaller graph")
    if n > 62:
        raise CapExceeded("exhaustive search is limited to 62 nodes")


def enumerate_equilibria(inst: GameInstance, model: Model | str | None = None,
                         cap: int = DEFAULT_CAP, workers: int = 1,
                         backend=None) -> EquilibriumReport:
    """All pure equilibria of ``inst`` (under ``model`` if given) plus the social optimum."""
    if model is not None:
        inst = inst.with_model(model)
    n = inst.n
    _check_cap(n, cap)
    k = inst.kernel(backend)
    ip, ix = inst.graph.csr
    total = 1 << n
    if workers > 1 and total >= 1 << 12:
        step = -(-total // (workers * 4))
        chunks = [(k.NAME, ip, ix, n, inst.weights, inst.relative, lo, min(lo + step, total))
                  for lo in range(0, total, step)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_scan, chunks))
    else:
        parts = [k.enumerate_range(ip, ix, n, *inst.weights, inst.relative, 0, total)]
    log.debug("scanned %d profiles for n=%d", total, n)

    scale = _core.scale_factor(n, inst.C, inst.L)
    equilibria = []
    best = None
    for masks, costs, opt_mask, opt_cost in parts:
        equilibria += [(StrategyProfile.from_mask(m, n), Fraction(c, scale))
                       for m, c in zip(masks, costs)]
        if opt_cost is not None:
            cand = (opt_cost, str(StrategyProfile.from_mask(opt_mask, n)))
            if best is None or cand < best:
                best = cand
    optimum = (StrategyProfile.from_string(best[1]), Fraction(best[0], scale))
    return EquilibriumReport(instance_summary(inst), equilibria, optimum)


def social_optimum(inst: GameInstance, cap: int = DEFAULT_CAP,
                   backend=None) -> tuple[StrategyProfile, Fraction]:
    return enumerate_equilibria(inst, cap=cap, backend=backend).optimum


def _ratio(num: Fraction | None, den: Fraction | None) -> Fraction | None:
    if num is None or den is None:
        return None
    return num / den


def analyze(inst: GameInstance, cap: int = DEFAULT_CAP, backend=None,
            workers: int = 1) -> EquilibriumReport:
    """Enumerate ``inst``'s equilibria and fill in WoF and PoA.

    WoF compares the worst selfish equilibrium with the worst equilibrium of
    ``inst``'s own model and F; it is ``None`` when either set is empty.
    """
    report = enumerate_equilibria(inst, cap=cap, backend=backend, workers=workers)
    if inst.friendship == 0:
        selfish = report
    else:
        selfish = enumerate_equilibria(inst.selfish(), cap=cap, backend=backend,
                                       workers=workers)
    report.wof = _ratio(selfish.worst_cost, report.worst_cost)
    report.poa = _ratio(selfish.worst_cost, report.optimum[1])
    return report


def wof(inst: GameInstance, cap: int = DEFAULT_CAP, backend=None) -> Fraction | None:
    return analyze(inst, cap, backend).wof


def poa(inst: GameInstance, cap: int = DEFAULT_CAP, backend=None) -> Fraction | None:
    return analyze(inst.selfish(), cap, backend).poa


def verify_profiles(inst: GameInstance, profiles) -> EquilibriumReport:
    """Certify candidate profiles; rejected ones get a witness deviation."""
    from .game import social_cost

    accepted = []
    witnesses = {}
    for a in profiles:
        ok, witness = is_equilibrium(inst, a)
        if ok:
            accepted.append((a, social_cost(inst, a)))
        else:
            witnesses[str(a)] = witness
    return EquilibriumReport(instance_summary(inst), accepted, witnesses=witnesses)


# ---------------------------------------------------------------------------
# Hardness-regime characterization and its combinatorial counterparts

def characterization_check(g: Graph, a: StrategyProfile) -> bool:
    """Insecure players have only secure neighbours, and every secure player
    has at least one insecure neighbour."""
    for i in range(g.node_count):
        nbrs = g.neighbors(i)
        if a[i]:
            if all(a[j] for j in nbrs):
                return False
        elif any(not a[j] for j in nbrs):
            return False
    return True


def _subsets(n: int):
    for r in range(n + 1):
        yield from (frozenset(s) for s in combinations(range(n), r))


def is_vertex_cover(g: Graph, cover) -> bool:
    return all(u in cover or v in cover for u, v in g.edges())


def minimal_vertex_covers(g: Graph) -> set[frozenset[int]]:
    covers = {s for s in _subsets(g.node_count) if is_vertex_cover(g, s)}
    return {s for s in covers if not any(is_vertex_cover(g, s - {v}) for v in s)}


def independent_dominating_sets(g: Graph) -> set[frozenset[int]]:
    out = set()
    for s in _subsets(g.node_count):
        if any(v in s for u in s for v in g.neighbors(u)):
            continue
        if all(u in s or any(v in s for v in g.neighbors(u)) for u in range(g.node_count)):
            out.add(s)
    return out
