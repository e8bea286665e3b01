import itertools
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from aixilab.corpus import biased_table, coin_table, tie_table
from aixilab.discount import FiniteLifetime, Geometric
from aixilab.env import ALPHA, BETA, Environment, History, SearchRelation, TableEnv, make_prop1_env, \
    make_rho_family_env, percept, random_table_env
from aixilab.errors import BudgetExhausted, Unresolvable
from aixilab.harness import RunConfig, simulate
from aixilab.policy import Agent, Constant, EpsOptimal, ExactOptimal, External, Scheduled, act_eps, \
    act_exact, act_schedule, decide_eps, grid_point, parse_schedule, step_tolerance, unit_fraction
from aixilab.value import Variant

HALF = Geometric(F(1, 2))
V, W = Variant.ITERATIVE, Variant.RECURSIVE
PROP1 = make_prop1_env(F(1, 4))


def two_valued(va, vb):
    """Alpha pays ``va`` forever, beta pays ``vb`` forever."""
    ea, eb = percept(0, va), percept(0, vb)
    rewards = sorted({va, vb})
    return TableEnv("two", (ALPHA, BETA), [0], rewards, 1,
                    [((ALPHA,), (ea,), 1), ((BETA,), (eb,), 1)], tail="repeat-last", is_measure=True)


class TestExact:
    def test_prop1_choices(self):
        assert act_exact(PROP1, HALF, History(), variant=V) == BETA
        assert act_exact(PROP1, HALF, History(), variant=W) == ALPHA

    def test_zero_values_pick_the_preferred_action(self):
        env = two_valued(F(0), F(0))
        assert act_exact(env, HALF, History()) == ALPHA
        assert act_exact(env, HALF, History(), tie_order=(BETA, ALPHA)) == BETA

    def test_tie_order_flips_exact_ties(self):
        env = tie_table()
        assert act_exact(env, HALF, History()) == ALPHA
        assert act_exact(env, HALF, History(), tie_order=(BETA, ALPHA)) == BETA

    def test_strict_winner_ignores_tie_order(self):
        env = two_valued(F(1, 4), F(1, 2))
        for order in itertools.permutations((ALPHA, BETA)):
            assert act_exact(env, HALF, History(), tie_order=order) == BETA

    def test_exhausted_lifetime_picks_the_preferred_action(self):
        h = History.of([BETA, ALPHA], [percept(0, F(1, 4)), percept(0, 0)])
        assert act_exact(PROP1, FiniteLifetime(2), h, tie_order=(BETA, ALPHA)) == BETA

    def test_uncertifiable_tie_is_unresolvable(self):
        # the first action never matters in rho, but the spine cannot be certified
        env = make_rho_family_env(0, SearchRelation.always())
        with pytest.raises(Unresolvable):
            act_exact(env, HALF, History(), k_max=4)

    def test_bad_tie_order(self):
        with pytest.raises(ValueError):
            act_exact(PROP1, HALF, History(), tie_order=(ALPHA, ALPHA))

    @pytest.mark.parametrize("seed", range(20))
    def test_exact_choice_attains_the_maximum(self, seed):
        env = random_table_env(seed, n_percepts=2 + seed % 2, depth=4, measure=seed % 2 == 0)
        m = 2 + seed % 3
        for variant, it in ((V, True), (W, False)):
            a = act_exact(env, FiniteLifetime(m), History(), variant=variant)
            best = max(oracles.value(env, m, History(pending=b), it) for b in env.actions)
            assert oracles.value(env, m, History(pending=a), it) == best

    @pytest.mark.parametrize("seed", range(10))
    def test_evaluation_order_does_not_matter(self, seed):
        env = random_table_env(seed, n_percepts=2, depth=3)
        for order in itertools.permutations(env.actions):
            for variant in (V, W):
                got = act_exact(env, FiniteLifetime(3), History(), variant=variant, eval_order=order)
                assert got == act_exact(env, FiniteLifetime(3), History(), variant=variant)
                got = act_eps(env, HALF, History(), F(1, 8), variant=variant, eval_order=order)
                assert got == act_eps(env, HALF, History(), F(1, 8), variant=variant)


class TestEps:
    def test_grid_separates_distinct_values(self):
        env = two_valued(F(3, 4), F(1, 4))
        assert act_eps(env, HALF, History(), F(1, 4)) == ALPHA
        assert act_eps(env, HALF, History(), F(1, 4), tie_order=(BETA, ALPHA)) == ALPHA

    def test_prop1_under_iterative_value(self):
        assert act_eps(PROP1, HALF, History(), F(1, 16), variant=V) == BETA

    def test_near_ties_go_to_the_preferred_action(self):
        env = two_valued(F(1, 2), F(1, 2) + F(1, 64))
        d = decide_eps(env, HALF, History(), F(1, 4))
        assert d.action == ALPHA and d.grid[ALPHA] == d.grid[BETA]
        assert act_eps(env, HALF, History(), F(1, 4), tie_order=(BETA, ALPHA)) == BETA

    def test_eps_must_be_a_unit_fraction(self):
        with pytest.raises(ValueError):
            act_eps(PROP1, HALF, History(), F(2, 5))
        with pytest.raises(ValueError):
            EpsOptimal(F(3, 4))

    def test_budget_exhaustion(self):
        # pays 1 per step and leaks 2^-(t+1) of its mass at step t, so about 29%
        # survives forever; nothing certifies that, and iterative leaves stay [0, ~1]
        class Fading(Environment):
            name = "fading"
            percepts = (percept(0, 1),)

            def _mass(self, actions, percepts):
                return math.prod(1 - F(1, 2 ** (i + 2)) for i in range(len(percepts)))

        env = Fading()
        assert act_eps(env, HALF, History(), F(1, 4), variant=W) == ALPHA
        with pytest.raises(BudgetExhausted):
            act_eps(env, HALF, History(), F(1, 4), variant=V, k_max=2)

    @settings(max_examples=200)
    @given(st.fractions(0, 1), st.fractions(0, F(1, 8)), st.integers(1, 16))
    def test_grid_point_rule(self, lo, width_share, k):
        eps = F(1, k)
        hi = min(F(1), lo + width_share * eps * 3)
        if hi - lo >= eps / 2:
            return
        q = grid_point(lo, hi, eps)
        assert (q / (eps / 2)).denominator == 1
        assert hi - eps / 2 < q < lo + eps / 2
        assert not (hi - eps / 2 < q - eps / 2)


class TestSchedule:
    def test_named_schedules(self):
        assert parse_schedule("harmonic")(1) == F(1, 2)
        assert parse_schedule("halving")(3) == F(1, 8)
        assert parse_schedule("const:1/4")(9) == F(1, 4)

    def test_delegation(self):
        env = biased_table()
        h = History()
        assert act_schedule(env, HALF, h, parse_schedule("harmonic")) == act_eps(env, HALF, h, F(1, 2))
        const = parse_schedule("const:1/8")
        g = History.of([ALPHA], [percept(0, 1)])
        for hist in (h, g):
            assert act_schedule(env, HALF, hist, const) == act_eps(env, HALF, hist, F(1, 8))

    def test_prop1_with_a_tight_first_step(self):
        sched = parse_schedule("const:1/16")
        assert act_schedule(PROP1, HALF, History(), sched, variant=V) == BETA

    def test_regret_stays_below_the_schedule_on_a_run(self):
        env = random_table_env(11, n_percepts=3, depth=4, measure=True)
        m = 4
        d = FiniteLifetime(m)
        sched = parse_schedule("harmonic")
        agent = Agent(Scheduled(sched, variant=V), env, d)
        for seed in range(5):
            run = simulate(RunConfig(env, agent.spec, d, m, seed), agent=agent)
            h = History()
            for rec in run.records:
                regret = oracles.value(env, m, h, True) - oracles.value(env, m, h, True, agent)
                assert regret < sched(h.time)
                h = h.then(rec.action, rec.percept)


def test_step_tolerance():
    assert step_tolerance(HALF, 1, F(1, 4)) == F(1, 8)
    assert step_tolerance(FiniteLifetime(4), 1, F(1, 2)) == F(1, 8)
    assert step_tolerance(FiniteLifetime(4), 4, F(1, 2)) == F(1, 2)
    assert unit_fraction(F(2, 7)) == F(1, 4)


def test_agent_kinds():
    env = coin_table()
    assert Agent(Constant(BETA), env, HALF)(History()) == BETA
    table = External.table({History(): BETA}, default=ALPHA)
    agent = Agent(table, env, HALF)
    assert agent(History()) == BETA
    assert agent(History.of([BETA], [percept(0, 1)])) == ALPHA
    exact = Agent(ExactOptimal(), env, HALF)
    assert exact.decide(History()) is exact.decide(History())


def test_greedy_iterative_play_is_not_optimal_from_the_root_on_semimeasures():
    # Later iterative values score only future rewards of surviving timelines, yet the
    # root value also credits rewards already collected, but only when the run survives.
    # Acting greedily on later values can therefore give up survival that the root needs.
    env = random_table_env(57, n_percepts=3, depth=4, measure=False)
    m = 2
    greedy = Agent(ExactOptimal(variant=V), env, FiniteLifetime(m))
    best = oracles.best_by_enumeration(env, m, History(), True)
    assert oracles.value(env, m, History(), True) == best == F(1, 3)
    assert oracles.value(env, m, History(), True, greedy) == F(5, 28)
    # recursive values add up along the run, so greedy play is optimal there
    greedy_w = Agent(ExactOptimal(variant=W), env, FiniteLifetime(m))
    assert oracles.value(env, m, History(), False, greedy_w) == oracles.value(env, m, History(), False)
