from fractions import Fraction as Fr

import pytest
from hypothesis import given
from hypothesis import strategies as st

from inoculation.dynamics import (PotentialConfig, Schedule, ScheduleKind, ThresholdVariant,
                                  audit_potential, convergence_stats, cycle_potential,
                                  parse_initial, random_profile, run_dynamics)
from inoculation.equilibria import is_equilibrium
from inoculation.game import GameInstance, InadmissibleError, StrategyProfile
from inoculation.graph import attack_components, make_cycle, make_star

from strategies import admissible_params, fractions_01, graphs, models, profiles

P = StrategyProfile.from_string


def inst(g, C, L, F=0, model="absolute"):
    return GameInstance(g, Fr(C), Fr(L), Fr(F), model)


class TestRuns:
    def test_star_example(self):
        i = inst(make_star(4), 1, 2)
        tr = run_dynamics(i, StrategyProfile.all_insecure(4))
        assert tr.changes == 1 and tr.converged
        assert str(tr.final) == "1000"
        assert tr.events[0].cost_before == 2 and tr.events[0].cost_after == 1
        assert is_equilibrium(i, tr.final)[0]
        assert convergence_stats(tr) == (2, 1, True)

    def test_already_equilibrium(self):
        i = inst(make_star(4), 1, 2)
        tr = run_dynamics(i, P("1000"))
        assert convergence_stats(tr) == (1, 0, True)

    def test_cycle_selfish_component_bound(self):
        i = inst(make_cycle(8), 1, 4)
        tr = run_dynamics(i, StrategyProfile.all_insecure(8))
        assert tr.converged
        assert max(attack_components(i.graph, tr.final).component_size) <= 2

    def test_truncated(self):
        i = inst(make_cycle(8), 1, 4)
        tr = run_dynamics(i, StrategyProfile.all_insecure(8), max_passes=1)
        assert not tr.converged and tr.passes == 1

    def test_fixed_schedule_not_covering_every_node(self):
        i = inst(make_star(4), 1, 2)
        # only the secure leaf 1 is asked; it is content, but the center is not
        tr = run_dynamics(i, P("0100"), Schedule.parse("fixed:1"))
        assert tr.changes == 0 and not tr.converged

    def test_fixed_schedule_bad_node(self):
        with pytest.raises(ValueError):
            run_dynamics(inst(make_star(4), 1, 2), StrategyProfile.all_insecure(4),
                         Schedule.parse("fixed:0,9"))

    def test_schedule_parsing(self):
        assert Schedule.parse("round-robin").kind is ScheduleKind.ROUND_ROBIN
        assert Schedule.parse("random", seed=3).seed == 3
        assert Schedule.parse("fixed:2,0").sequence == (2, 0)
        with pytest.raises(ValueError):
            Schedule.parse("sometimes")

    def test_initial_rules(self):
        assert str(parse_initial("bits:0101", 4)) == "0101"
        assert parse_initial("all-secure", 3).num_secure == 3
        assert parse_initial("random", 20, seed=1) == random_profile(20, 1)
        with pytest.raises(ValueError):
            parse_initial("bits:01", 3)
        with pytest.raises(ValueError):
            parse_initial("most", 3)

    def test_trace_json_shape(self):
        tr = run_dynamics(inst(make_star(4), 1, 2), StrategyProfile.all_insecure(4))
        d = tr.to_dict()
        assert set(d) == {"instance", "schedule", "events", "final", "converged", "passes",
                          "changes"}
        assert d["events"] == [{"pass": 0, "node": 0, "from": 0, "to": 1}]

    def test_random_schedule_is_seeded(self):
        i = inst(make_cycle(30), 1, 4, Fr(1, 2))
        a = random_profile(30, 7)
        t1 = run_dynamics(i, a, Schedule.parse("random", 11)).to_json()
        t2 = run_dynamics(i, a, Schedule.parse("random", 11)).to_json()
        assert t1 == t2

    @given(st.data())
    def test_converged_runs_end_in_equilibrium(self, data):
        g = data.draw(graphs(min_n=2, max_n=10, connected=True))
        C, L = data.draw(admissible_params(g.node_count))
        F = data.draw(fractions_01)
        model = data.draw(models)
        i = GameInstance(g, C, L, F, model)
        a = StrategyProfile(data.draw(profiles(g.node_count)))
        sched = data.draw(st.sampled_from(["round-robin", "random"]))
        tr = run_dynamics(i, a, Schedule.parse(sched, seed=5))
        if tr.converged:
            assert is_equilibrium(i, tr.final)[0]
        assert tr.to_json() == run_dynamics(i, a, Schedule.parse(sched, seed=5)).to_json()

    def test_backends_produce_same_trace(self):
        i = inst(make_cycle(40), 1, 4, Fr(1, 2), "relative")
        a = random_profile(40, 3)
        assert run_dynamics(i, a, backend="python").to_json() == \
            run_dynamics(i, a, backend="auto").to_json()


class TestPotential:
    def test_threshold_values(self):
        i = inst(make_cycle(8), 1, 4, Fr(1, 2))
        assert PotentialConfig().threshold(i) == 1
        assert PotentialConfig("literal").threshold(i) == 8 / Fr(2) - 8 + 1
        r = inst(make_cycle(8), 1, 4, Fr(1, 2), "relative")
        assert PotentialConfig().threshold(r) == Fr(4 - Fr(1, 2), Fr(5, 2))

    def test_examples(self):
        i = inst(make_cycle(8), 1, 4, Fr(1, 2))
        cfg = PotentialConfig()
        assert cycle_potential(i, StrategyProfile.all_secure(8), cfg) == 0
        assert cycle_potential(i, StrategyProfile.all_insecure(8), cfg) == 8
        assert cycle_potential(i, P("00110111"), cfg) == 1  # insecure {0,1,4}

    def test_requires_cycle_and_friendship(self):
        with pytest.raises(InadmissibleError):
            cycle_potential(inst(make_star(4), 1, 2, Fr(1, 2)), P("1000"), PotentialConfig())
        with pytest.raises(InadmissibleError):
            PotentialConfig().threshold(inst(make_cycle(5), 1, 2))

    @given(st.data())
    def test_potential_bounded(self, data):
        n = data.draw(st.integers(3, 30))
        C, L = data.draw(admissible_params(n))
        F = data.draw(st.builds(Fr, st.integers(1, 16), st.just(16)))
        model = data.draw(st.sampled_from(["absolute", "relative"]))
        variant = data.draw(st.sampled_from(list(ThresholdVariant)))
        a = StrategyProfile(data.draw(profiles(n)))
        phi = cycle_potential(GameInstance(make_cycle(n), C, L, F, model), a,
                              PotentialConfig(variant))
        assert -n <= phi <= n

    def test_trace_records_potential(self):
        i = inst(make_cycle(12), 1, 4, Fr(1, 2))
        tr = run_dynamics(i, random_profile(12, 2), potential=PotentialConfig())
        pot = tr.to_dict()["potential"]
        assert len(pot) == tr.changes + 1 and pot[0] == tr.initial_phi

    def test_audit_rederived_passes_and_literal_fails(self):
        rederived = literal = 0
        for seed in range(60):
            n = 10 + seed % 20
            i = GameInstance(make_cycle(n), Fr(1), Fr(3), Fr(1 + seed % 4, 4),
                             "absolute" if seed % 2 else "relative")
            tr = run_dynamics(i, random_profile(n, seed))
            rederived += len(audit_potential(i, tr, PotentialConfig()).violations)
            literal += len(audit_potential(i, tr, PotentialConfig("literal")).violations)
        assert rederived == 0
        assert literal > 0
