from fractions import Fraction as Fr

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from inoculation.game import (GameInstance, InadmissibleError, Model, StrategyProfile,
                              actual_cost, best_response, cost_report, format_rational,
                              inoculation_threshold, parse_rational, perceived_cost, social_cost)
from inoculation.graph import (Graph, attack_components, hypothetical_component_size,
                               make_complete, make_cycle, make_star)

import oracles
from strategies import admissible_params, fractions_01, graphs, models, profiles

S4_CENTER = StrategyProfile.from_secure(4, {0})


def inst(g, C, L, F=0, model="absolute"):
    return GameInstance(g, Fr(C), Fr(L), Fr(F), model)


class TestParsing:
    @pytest.mark.parametrize("text, value", [("13/32", Fr(13, 32)), ("0.25", Fr(1, 4)),
                                             ("4", Fr(4)), (" 1/2 ", Fr(1, 2))])
    def test_parse(self, text, value):
        assert parse_rational(text) == value

    @pytest.mark.parametrize("text", ["abc", "1/0", "", "nan"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            parse_rational(text)

    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            parse_rational(0.1)

    def test_format(self):
        assert format_rational(Fr(4, 3)) == "4/3"
        assert format_rational(Fr(4)) == "4"

    def test_profile_string(self):
        a = StrategyProfile.from_string("0110")
        assert str(a) == "0110" and a.secure == {1, 2} and a.mask == 0b0110
        assert StrategyProfile.from_mask(a.mask, 4) == a
        with pytest.raises(ValueError):
            StrategyProfile.from_string("012")


class TestAdmissibility:
    def test_regime(self):
        g = make_complete(4)
        with pytest.raises(InadmissibleError):
            inst(g, Fr(1, 4), 1)  # C = L/n is excluded
        with pytest.raises(InadmissibleError):
            inst(g, 2, 1)
        with pytest.raises(InadmissibleError):
            inst(g, 1, 1, F=Fr(3, 2))
        inst(g, 1, 1)

    def test_relative_rejects_isolated(self):
        g = Graph.from_edges(3, [(0, 1)])
        inst(g, 1, 1, Fr(1, 2), "absolute")
        with pytest.raises(InadmissibleError):
            inst(g, 1, 1, Fr(1, 2), "relative")

    def test_selfish_ignores_stored_F(self):
        i = inst(make_star(4), 1, 2, Fr(1, 2), "selfish")
        assert i.friendship == 0
        assert perceived_cost(i, S4_CENTER, 0) == 1


class TestCosts:
    def test_actual_cost_star(self):
        i = inst(make_star(4), 1, 2)
        assert actual_cost(i, S4_CENTER, 1) == Fr(1, 2)
        assert actual_cost(i, S4_CENTER, 0) == 1

    def test_all_secure_costs_C(self):
        i = inst(make_cycle(5), Fr(3, 4), 1)
        rep = cost_report(i, StrategyProfile.all_secure(5))
        assert set(rep.actual) == {Fr(3, 4)}
        assert rep.social == 5 * Fr(3, 4)

    def test_complete_all_insecure(self):
        i = inst(make_complete(4), 1, 1)
        a = StrategyProfile.all_insecure(4)
        assert all(actual_cost(i, a, v) == 1 for v in range(4))
        assert social_cost(i, a) == 4

    def test_perceived_examples(self):
        g = make_star(4)
        assert perceived_cost(inst(g, 1, 2, Fr(1, 2), "absolute"), S4_CENTER, 0) == Fr(7, 4)
        assert perceived_cost(inst(g, 1, 2, Fr(1, 2), "relative"), S4_CENTER, 0) == Fr(5, 4)

    def test_social_star_optimum_formula(self):
        assert social_cost(inst(make_star(4), 1, 2), S4_CENTER) == Fr(5, 2)

    @given(st.data())
    def test_costs_match_oracle(self, data):
        g = data.draw(graphs(min_n=2, connected=True))
        C, L = data.draw(admissible_params(g.node_count))
        F = data.draw(fractions_01)
        model = data.draw(models)
        a = data.draw(profiles(g.node_count))
        i = GameInstance(g, C, L, F, model)
        ng = oracles.to_nx(g.node_count, g.edges())
        rep = cost_report(i, StrategyProfile(a))
        assert list(rep.actual) == oracles.actual_costs(ng, a, C, L)
        for v in range(g.node_count):
            assert rep.perceived[v] == oracles.perceived(ng, a, C, L, F, model, v)
        assert rep.social == oracles.social(ng, a, C, L)
        assert all(c >= 0 for c in rep.actual)


class TestThreshold:
    def test_selfish_threshold(self):
        i = inst(make_cycle(8), 1, 4)
        a = StrategyProfile.all_insecure(8)
        assert inoculation_threshold(i, a, 3) == Fr(2)

    def test_absolute_example(self):
        # node 1 on C_8 with insecure neighbours 0 and 2 in singleton components
        i = inst(make_cycle(8), 1, 4, Fr(1, 2), "absolute")
        a = StrategyProfile.from_string("01010111")  # 0 and 2 insecure singletons
        assert inoculation_threshold(i, a, 1) == Fr(3, 2)

    def test_relative_example_degree_four(self):
        # node 0 with four neighbours, two insecure singletons
        edges = [(0, 1), (0, 2), (0, 3), (0, 4), (4, 5), (5, 6), (6, 7)]
        g = Graph.from_edges(8, edges)
        i = inst(g, 1, 4, Fr(1, 2), "relative")
        a = StrategyProfile.from_string("10011111")
        assert inoculation_threshold(i, a, 0) == Fr(9, 5)

    @given(st.data())
    def test_threshold_consistency(self, data):
        g = data.draw(graphs(min_n=2, max_n=7, connected=True))
        C, L = data.draw(admissible_params(g.node_count))
        F = data.draw(fractions_01)
        model = data.draw(st.sampled_from(["absolute", "relative"]))
        a = StrategyProfile(data.draw(profiles(g.node_count)))
        i = GameInstance(g, C, L, F, model)
        v = data.draw(st.integers(0, g.node_count - 1))
        t = inoculation_threshold(i, a, v)
        k = hypothetical_component_size(g, a, v) if a[v] else attack_components(g, a).size_of(v)
        pref, improves = best_response(i, a, v)
        if not a[v]:
            assert improves == (k > t)
        else:
            assert improves == (k < t)


class TestBestResponse:
    @given(st.data())
    def test_all_secure_always_flips(self, data):
        g = data.draw(graphs(min_n=2, connected=True))
        C, L = data.draw(admissible_params(g.node_count))
        F = data.draw(fractions_01)
        model = data.draw(models)
        i = GameInstance(g, C, L, F, model)
        a = StrategyProfile.all_secure(g.node_count)
        v = data.draw(st.integers(0, g.node_count - 1))
        assert best_response(i, a, v) == (False, True)

    def test_clique_two_insecure_stays(self):
        i = inst(make_complete(4), 1, 1, 1)
        a = StrategyProfile.from_string("0011")
        assert best_response(i, a, 0) == (False, False)

    def test_star_center_flips(self):
        i = inst(make_star(8), Fr(13, 32), 1, Fr(1, 8))
        a = StrategyProfile.from_string("00011111")
        assert best_response(i, a, 0) == (True, True)

    def test_ties_do_not_flip(self):
        # path 0-1-2 with only 1 insecure: joining it costs (3/2)*2/3 = 1 = C
        i = inst(Graph.from_edges(3, [(0, 1), (1, 2)]), 1, Fr(3, 2))
        a = StrategyProfile.from_string("101")
        assert best_response(i, a, 0) == (True, False)


class TestInvariants:
    @given(st.data())
    def test_model_degeneracy(self, data):
        g = data.draw(graphs(min_n=2, connected=True))
        C, L = data.draw(admissible_params(g.node_count))
        a = StrategyProfile(data.draw(profiles(g.node_count)))
        base = GameInstance(g, C, L, 0, "selfish")
        for model in Model:
            other = GameInstance(g, C, L, 0, model)
            assert all(perceived_cost(base, a, v) == perceived_cost(other, a, v)
                       for v in range(g.node_count))

    @given(st.data())
    def test_degree_one_identity(self, data):
        g = data.draw(graphs(min_n=2, connected=True))
        C, L = data.draw(admissible_params(g.node_count))
        F = data.draw(fractions_01)
        a = StrategyProfile(data.draw(profiles(g.node_count)))
        ab = GameInstance(g, C, L, F, "absolute")
        rel = GameInstance(g, C, L, F, "relative")
        for v in range(g.node_count):
            if g.degree(v) == 1:
                assert perceived_cost(ab, a, v) == perceived_cost(rel, a, v)

    @given(st.data())
    def test_scale_invariance(self, data):
        g = data.draw(graphs(min_n=2, max_n=7, connected=True))
        C, L = data.draw(admissible_params(g.node_count))
        F = data.draw(fractions_01)
        model = data.draw(models)
        lam = Fr(data.draw(st.integers(1, 9)), data.draw(st.integers(1, 9)))
        assume(lam != 1)
        a = StrategyProfile(data.draw(profiles(g.node_count)))
        i1 = GameInstance(g, C, L, F, model)
        i2 = GameInstance(g, lam * C, lam * L, F, model)
        r1, r2 = cost_report(i1, a), cost_report(i2, a)
        assert all(lam * x == y for x, y in zip(r1.perceived, r2.perceived))
        assert lam * r1.social == r2.social
        assert all(best_response(i1, a, v) == best_response(i2, a, v)
                   for v in range(g.node_count))
