"""Compare the compiled and pure-Python kernels on the two hot paths.

    python3 benchmarks/bench_kernels.py [--enum-n 14] [--side 10] [--repeat 3]
"""
import argparse
import time
from fractions import Fraction

from inoculation.dynamics import run_dynamics
from inoculation.equilibria import enumerate_equilibria
from inoculation.game import GameInstance, StrategyProfile
from inoculation.graph import KleinbergParams, make_kleinberg, make_random


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t)
    return min(times), result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--enum-n", type=int, default=14)
    ap.add_argument("--side", type=int, default=10)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    g = make_random(args.enum_n, 0.3, seed=1)
    enum_inst = GameInstance(g, Fraction(1), Fraction(3), Fraction(1, 2), "absolute")
    graphs = [make_kleinberg(KleinbergParams(side=args.side, seed=s)) for s in range(args.trials)]
    dyn = [GameInstance(h, Fraction(1), Fraction(4), Fraction(1, 2), "relative") for h in graphs]

    def run_enum(backend):
        return enumerate_equilibria(enum_inst, backend=backend).equilibria

    def run_dyn(backend):
        return [run_dynamics(i, StrategyProfile.all_insecure(i.n), record_costs=False,
                             backend=backend).final for i in dyn]

    print(f"{'task':<34}{'python':>10}{'cython':>10}{'speedup':>9}")
    for label, fn in ((f"enumerate 2^{args.enum_n} profiles", run_enum),
                      (f"dynamics x{args.trials} kleinberg {args.side}x{args.side}", run_dyn)):
        t_py, r_py = best_of(lambda: fn("python"), args.repeat)
        t_cy, r_cy = best_of(lambda: fn("cython"), args.repeat)
        assert r_py == r_cy, "backends disagree"
        print(f"{label:<34}{t_py:>9.3f}s{t_cy:>9.3f}s{t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    main()
