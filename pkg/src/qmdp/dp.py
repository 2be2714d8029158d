"""Functional backward induction and functional value iteration.

Instead of scalar state values, every state carries a step function of
wealth: ``V_t(s, .)`` is the best probability of ending with wealth above
the target, as a function of the wealth accumulated so far.  The backward
update pulls each successor slice through the wealth accumulation (shift),
mixes successors with the kernel (combine), and takes the per-action upper
envelope (pointwise_max); the envelope's argmax structure is exactly the
greedy wealth-Markovian decision rule.

Finite horizons run T sweeps (:func:`backward_induction`).  Infinite
horizons with uniformly signed rewards and undiscounted additive wealth
iterate the same sweep to convergence (:func:`value_iteration`) and return
a stationary policy.
"""

import numpy as np

from .errors import ConfigurationError, ConvergenceError
from .stepfun import (ActionMap, combine, pointwise_max, restrict, shift,
                      sup_distance, target_utility)
from .wealth import AdditiveWealth


class ValueFunction:
    """Per-timestep, per-state wealth slices.

    ``slices[t][s]`` for t in 0..T; layer T is the terminal target
    utility.  A converged infinite-horizon table has a single layer.
    """

    def __init__(self, slices, stationary=False):
        self.slices = slices
        self.stationary = stationary

    @property
    def horizon(self):
        return None if self.stationary else len(self.slices) - 1

    def slice(self, t, s):
        return self.slices[0][s] if self.stationary else self.slices[t][s]


class WealthMarkovPolicy:
    """Deterministic policy whose decision rules map (state, wealth) to actions.

    ``rules[t][s]`` is an :class:`ActionMap` over wealth keys; stationary
    policies store a single per-state list and ignore ``t``.
    """

    def __init__(self, rules, stationary=False):
        self.rules = rules
        self.stationary = stationary

    @classmethod
    def from_markov(cls, actions, stationary=False):
        """Wrap a plain (wealth-independent) Markov policy.

        ``actions`` is a per-timestep list of per-state action indices, or
        a single per-state list when stationary.
        """
        if stationary:
            return cls([ActionMap.constant(a) for a in actions], stationary=True)
        return cls([[ActionMap.constant(a) for a in row] for row in actions])

    def rule(self, t, s):
        return self.rules[s] if self.stationary else self.rules[t][s]

    def action(self, t, s, w_key):
        return self.rule(t, s).action(w_key)

    def action_many(self, t, s, w_keys):
        return self.rule(t, s).action_many(w_keys)

    @property
    def horizon(self):
        return None if self.stationary else len(self.rules)

    def __repr__(self):
        if self.stationary:
            return f"WealthMarkovPolicy(stationary, {len(self.rules)} states)"
        return (f"WealthMarkovPolicy({len(self.rules)} steps x "
                f"{len(self.rules[0]) if self.rules else 0} states)")


def _greedy_update(m, space, nxt, t):
    """One backward sweep at timestep t against the layer-(t+1) slices.

    Returns (slices, rules): the layer-t value slices and the greedy
    argmax decision rule per state (lowest action index on ties).
    """
    slices = []
    rules = []
    sa_rewards = m.reward_kind == "sa"
    for s in range(m.n_states):
        qs = []
        for a in range(m.n_actions):
            succ = m.successors(s, a)
            prob = m.probabilities(s, a)
            if sa_rewards:
                mixed = combine([(prob[i], nxt[succ[i]])
                                 for i in range(len(succ))])
                qs.append(shift(mixed, m.reward(s, a), t, space))
            else:
                rs = m.edge_rewards(s, a)
                qs.append(combine([(prob[i], shift(nxt[succ[i]], rs[i], t, space))
                                   for i in range(len(succ))]))
        env, amap = pointwise_max(qs)
        slices.append(env)
        rules.append(amap)
    return slices, rules


def backward_induction(m, space, w, strict):
    """Maximize the probability of terminal wealth above ``w``.

    ``strict`` selects the strict indicator target (lower-quantile mode);
    non-strict is the upper-quantile mode.  Returns ``(policy, p, vf)``
    where p is the optimal exceedance probability from the initial state
    and vf the full per-timestep value table.
    """
    if m.horizon is None:
        raise ConfigurationError(
            "backward_induction needs a finite horizon; "
            "use value_iteration for infinite-horizon problems")
    T = m.horizon
    terminal = target_utility(space.key(w), strict)
    slices = [None] * (T + 1)
    slices[T] = [terminal] * m.n_states
    rules = [None] * T
    for t in range(T - 1, -1, -1):
        slices[t], rules[t] = _greedy_update(m, space, slices[t + 1], t)
    p = slices[0][m.initial_state](space.key(space.w0))
    return (WealthMarkovPolicy(rules), float(p), ValueFunction(slices))


def extract_policy(vf, m, space):
    """Greedy policy of a completed value table.

    Recomputes the per-(t, s) argmax from the stored slices, so it can be
    checked against the policy built during the sweep itself.
    """
    if vf.stationary:
        _, rules = _greedy_update(m, space, vf.slices[0], 0)
        return WealthMarkovPolicy(rules, stationary=True)
    T = len(vf.slices) - 1
    rules = [_greedy_update(m, space, vf.slices[t + 1], t)[1] for t in range(T)]
    return WealthMarkovPolicy(rules)


def value_iteration(m, space, w, strict, eps_conv=1e-6, max_sweeps=10000):
    """Infinite-horizon variant: iterate the sweep until the slices settle.

    Requires undiscounted additive wealth and uniformly signed rewards
    (all <= 0, or all >= 0 — the two cases in which stationary
    deterministic wealth-Markovian optima exist).  Stops when
    ``max_s sup_distance(V_k(s,.), V_{k-1}(s,.)) <= eps_conv`` and returns
    ``(stationary_policy, p, sweeps)``.
    """
    if m.horizon is not None:
        raise ConfigurationError(
            "value_iteration is for infinite-horizon problems; "
            "use backward_induction for finite horizons")
    if not isinstance(space, AdditiveWealth):
        raise ConfigurationError(
            "the stationary sweep needs a time-homogeneous wealth update: "
            "only undiscounted additive wealth is supported")
    sign = m.reward_sign()
    if sign == "mixed":
        raise ConfigurationError(
            "infinite-horizon solves need uniformly signed rewards "
            "(all <= 0 or all >= 0)")
    # Wealth starts at w0 = 0 and moves one way, so slices only ever get
    # evaluated on the reachable side of 0; collapsing the other side is
    # exact there and is what makes the sup-residual converge.
    w0_key = space.key(space.w0)
    clip_lo = w0_key if sign == "nonnegative" else None
    clip_hi = w0_key if sign in ("nonpositive", "zero") else None

    def clipped(f):
        return restrict(f, lo=clip_lo, hi=clip_hi)

    V = [clipped(target_utility(space.key(w), strict))] * m.n_states
    residual = np.inf
    for sweep in range(1, max_sweeps + 1):
        new_V, _ = _greedy_update(m, space, V, 0)
        new_V = [clipped(f) for f in new_V]
        residual = max(sup_distance(new_V[s], V[s]) for s in range(m.n_states))
        V = new_V
        if residual <= eps_conv:
            _, rules = _greedy_update(m, space, V, 0)
            policy = WealthMarkovPolicy(rules, stationary=True)
            p = V[m.initial_state](space.key(space.w0))
            return policy, float(p), sweep
    raise ConvergenceError(
        f"no convergence after {max_sweeps} sweeps "
        f"(last residual {residual:.3g} > {eps_conv:.3g})",
        residual=residual, sweeps=max_sweeps)
