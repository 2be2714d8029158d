import math

import numpy as np
import pytest

from qmdp import (AdditiveWealth, ConfigurationError, GarnetConfig, Mdp,
                  OrdinalWealth, QuantileQuery, WealthMarkovPolicy,
                  brute_force_distributions, brute_force_optimal_quantile,
                  exact_distribution, generate_garnet, iteration_bound,
                  quantile_certificate, solve_quantile, validate)
from conftest import random_lattice_mdp


def small_instance(seed):
    m = generate_garnet(GarnetConfig(4, 2, 2, seed=seed), horizon=3)
    return m, AdditiveWealth.for_mdp(m)


# -- query validation -----------------------------------------------------------

def test_query_tau_ranges():
    QuantileQuery(tau=1.0, criterion="lower").check()
    QuantileQuery(tau=0.0, criterion="upper").check()
    with pytest.raises(ConfigurationError):
        QuantileQuery(tau=0.0, criterion="lower").check()
    with pytest.raises(ConfigurationError):
        QuantileQuery(tau=1.0, criterion="upper").check()
    with pytest.raises(ConfigurationError):
        QuantileQuery(tau=0.5, criterion="median").check()
    with pytest.raises(ConfigurationError):
        QuantileQuery(tau=0.5, epsilon=0.0).check()


def test_horizon_mode_mismatch():
    m, space = small_instance(0)
    query = QuantileQuery(tau=0.5, horizon_mode="infinite")
    with pytest.raises(ConfigurationError):
        solve_quantile(m, space, query)


def test_invalid_mdp_rejected():
    m = Mdp(2, 1, [[[(0, 0.5), (1, 0.4)]], [[(1, 1.0)]]],
            {"kind": "sa", "values": [[0.0], [0.0]]}, 0, 2)
    from qmdp import ValidationError
    with pytest.raises(ValidationError):
        solve_quantile(m, AdditiveWealth(-1, 1), QuantileQuery(tau=0.5))


# -- iteration bound ---------------------------------------------------------------

def test_iteration_bound_formula():
    sp = AdditiveWealth(0.0, 5.0)
    assert iteration_bound(sp, 1e-3) == math.ceil(math.log2(5.0 / 1e-3)) == 13
    osp = OrdinalWealth([f"w{i}" for i in range(1, 8)])
    assert iteration_bound(osp, 1.0) == 3


def test_solver_respects_iteration_bound():
    m, space = small_instance(5)
    query = QuantileQuery(tau=0.3, criterion="lower", epsilon=1e-3)
    report = solve_quantile(m, space, query)
    assert report.iterations <= iteration_bound(space, 1e-3)
    assert space.distance(*report.bracket) <= 1e-3


# -- small-instance agreement with the oracle ---------------------------------------

@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("criterion,tau", [("lower", 0.25), ("lower", 0.75),
                                           ("upper", 0.25), ("upper", 0.75)])
def test_matches_brute_force(seed, criterion, tau):
    m, space = small_instance(seed)
    oracle_q, _ = brute_force_optimal_quantile(m, space, tau, criterion)
    query = QuantileQuery(tau=tau, criterion=criterion, epsilon=1e-6)
    report = solve_quantile(m, space, query)
    assert abs(report.quantile - oracle_q) <= 1e-6
    assert quantile_certificate(m, space, report, query)


def test_bracket_always_contains_optimum():
    m, space = small_instance(9)
    tau, criterion = 0.4, "lower"
    oracle_q, _ = brute_force_optimal_quantile(m, space, tau, criterion)
    report = solve_quantile(m, space,
                            QuantileQuery(tau=tau, criterion=criterion,
                                          epsilon=1e-6))
    # replay the bracket evolution from the log
    lo, hi = space.w_min, space.w_max
    for rec in report.log:
        assert lo - 1e-12 <= oracle_q <= hi + 1e-12
        if rec.accepted:
            lo = rec.w
        else:
            hi = rec.w
    assert lo - 1e-12 <= oracle_q <= hi + 1e-12


def test_lower_le_upper_and_tau_monotone():
    m, space = small_instance(13)
    dists = []
    for atoms, _ in brute_force_distributions(m, space):
        final = {}
        for (_, wk), mass in atoms.items():
            final[wk] = final.get(wk, 0.0) + mass
        from qmdp import WealthDistribution
        dists.append(WealthDistribution.from_atoms(space, final))
    last = {"lower": -np.inf, "upper": -np.inf}
    for tau in (0.2, 0.4, 0.6, 0.8):
        best = {c: max(d.quantile(tau, c) for d in dists)
                for c in ("lower", "upper")}
        assert best["lower"] <= best["upper"] + 1e-12
        for c in ("lower", "upper"):
            assert best[c] >= last[c] - 1e-12
            last[c] = best[c]


# -- ordinal exactness ---------------------------------------------------------------

def test_prec_extraction_scenario(prec_instance):
    m, space = prec_instance
    query = QuantileQuery(tau=0.5, criterion="lower", epsilon=1.0)
    report = solve_quantile(m, space, query)
    assert report.quantile == "w2"
    d = exact_distribution(m, space, report.policy)
    assert d.quantile(0.5, "lower") == "w2"
    assert quantile_certificate(m, space, report, query)


def test_ordinal_iterations_within_log2_m(prec_instance):
    m, space = prec_instance
    report = solve_quantile(m, space, QuantileQuery(tau=0.5, criterion="lower",
                                                    epsilon=1.0))
    assert report.iterations <= math.ceil(math.log2(len(space.classes)))


def test_ordinal_small_epsilon_still_terminates(prec_instance):
    # integer bracket distances cannot go below 1; epsilon is clamped
    m, space = prec_instance
    report = solve_quantile(m, space, QuantileQuery(tau=0.5, criterion="lower",
                                                    epsilon=0.25))
    assert report.quantile == "w2"


def test_ordinal_upper_exact(prec_instance):
    m, space = prec_instance
    for tau in (0.2, 0.5, 0.8):
        oracle_q, _ = brute_force_optimal_quantile(m, space, tau, "upper")
        report = solve_quantile(m, space,
                                QuantileQuery(tau=tau, criterion="upper",
                                              epsilon=1.0))
        assert report.quantile == oracle_q


def test_ordinal_random_instances_exact():
    # random 2-step ordinal MDPs driven by a monotone transition table
    classes = ["w1", "w2", "w3", "w4", "w5"]
    table = {}
    for i, c in enumerate(classes):
        table[c] = {"up2": classes[min(i + 2, 4)],
                    "up1": classes[min(i + 1, 4)],
                    "stay": c}
    labels = ["up2", "up1", "stay"]
    for seed in range(8):
        rng = np.random.default_rng(seed)
        space = OrdinalWealth(classes, table)
        n_s, n_a = 3, 2
        transitions, values = [], []
        for s in range(n_s):
            trow, vrow = [], []
            for a in range(n_a):
                succ = np.sort(rng.choice(n_s, 2, replace=False))
                p = float(rng.uniform(0.2, 0.8))
                trow.append([(int(succ[0]), p), (int(succ[1]), 1.0 - p)])
                vrow.append([labels[rng.integers(0, 3)] for _ in range(2)])
            transitions.append(trow)
            values.append(vrow)
        m = Mdp(n_s, n_a, transitions, {"kind": "sas", "values": values}, 0, 2)
        assert validate(m) == []
        for tau, criterion in ((0.3, "lower"), (0.7, "lower"),
                               (0.3, "upper"), (0.7, "upper")):
            oracle_q, _ = brute_force_optimal_quantile(m, space, tau, criterion)
            report = solve_quantile(
                m, space, QuantileQuery(tau=tau, criterion=criterion, epsilon=1.0))
            assert report.quantile == oracle_q, (seed, tau, criterion)


# -- degenerate paths -----------------------------------------------------------------

def test_at_bottom_flag():
    # single policy, point mass at 1.0; bracket forced wider by the override
    m = Mdp(2, 1, [[[(1, 1.0)]], [[(1, 1.0)]]],
            {"kind": "sa", "values": [[1.0], [0.0]]}, 0, 1)
    space = AdditiveWealth.for_mdp(m)
    query = QuantileQuery(tau=0.5, criterion="lower", epsilon=1e-2,
                          quantile_bounds=(1.0, 2.0))
    report = solve_quantile(m, space, query)
    assert report.at_bottom
    assert report.quantile == 1.0
    assert quantile_certificate(m, space, report, query)


def test_tau_one_lower_returns_max_support():
    m, space = small_instance(3)
    query = QuantileQuery(tau=1.0, criterion="lower", epsilon=1e-6)
    report = solve_quantile(m, space, query)
    d = exact_distribution(m, space, report.policy)
    assert d.quantile(1.0, "lower") == d.support[-1][0]
    assert quantile_certificate(m, space, report, query)
    oracle_q, _ = brute_force_optimal_quantile(m, space, 1.0, "lower")
    assert abs(report.quantile - oracle_q) <= 1e-6


def test_certificate_rejects_bad_policy():
    m, space = small_instance(2)
    tau, criterion = 0.6, "lower"
    query = QuantileQuery(tau=tau, criterion=criterion, epsilon=1e-6)
    report = solve_quantile(m, space, query)
    assert quantile_certificate(m, space, report, query)
    # flip every action at every decision point of the first step
    flipped = [[_flip(rule, m.n_actions) for rule in row]
               for row in report.policy.rules]
    report.policy = WealthMarkovPolicy(flipped)
    d = exact_distribution(m, space, report.policy)
    lo = report.bracket[0]
    should_hold = d.cdf(lo) < tau
    assert quantile_certificate(m, space, report, query) == should_hold


def _flip(rule, n_actions):
    from qmdp import ActionMap
    return ActionMap(n_actions - 1 - rule.base, rule.x, rule.e == 0,
                     n_actions - 1 - rule.a)


# -- infinite horizon ---------------------------------------------------------------

def test_infinite_requires_bounds():
    m = random_lattice_mdp(1)
    space = AdditiveWealth.for_mdp(m)
    with pytest.raises(ConfigurationError):
        solve_quantile(m, space, QuantileQuery(tau=0.3, criterion="upper"))


def test_infinite_solve_stationary():
    m = random_lattice_mdp(1)
    space = AdditiveWealth.for_mdp(m)
    query = QuantileQuery(tau=0.3, criterion="upper",
                          epsilon=1e-3, quantile_bounds=(-10.0, 0.0))
    report = solve_quantile(m, space, query)
    assert report.policy.stationary
    assert report.stationary
    assert report.sweeps > 0
    assert space.distance(*report.bracket) <= 1e-3


def test_infinite_rejects_mixed_signs():
    m = generate_garnet(GarnetConfig(4, 2, 2, reward_low=-1, reward_high=1,
                                     seed=0), horizon=None)
    space = AdditiveWealth(-5, 5)
    with pytest.raises(ConfigurationError):
        solve_quantile(m, space, QuantileQuery(tau=0.3, criterion="upper",
                                               quantile_bounds=(-5.0, 5.0)))


def test_keep_value_function():
    m, space = small_instance(1)
    query = QuantileQuery(tau=0.5, criterion="upper", epsilon=1e-3)
    report = solve_quantile(m, space, query, keep_value_function=True)
    assert report.value_function is not None
    assert len(report.value_function.slices) == m.horizon + 1
