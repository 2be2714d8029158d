"""Binary search over wealth thresholds for epsilon-optimal quantile policies.

Each iteration solves one indicator-utility MDP: for the lower criterion
the subroutine maximizes P[wealth > w] and the test is p > 1 - tau; for
the upper criterion it maximizes P[wealth >= w] and the test is
p >= 1 - tau.  Successful tests raise the bracket bottom and cache the
policy; failures lower the top.  The search stops once the bracket is no
wider than epsilon, at which point the cached policy's quantile is within
epsilon of the optimum.

Finite ordinal spaces get exact answers: the bracket distance is integer
valued, so the search runs to adjacency (effective epsilon = 1, fewer
iterations are impossible) and endpoint probes resolve which bracket end
is the optimal quantile.  Lower-criterion ordinal queries finish with one
extra solve at the predecessor of the optimal quantile, which is what
makes the *returned policy* exactly optimal rather than just its
quantile.
"""

import math
from dataclasses import dataclass, field

from .dp import backward_induction, value_iteration
from .errors import ConfigurationError, ValidationError
from .evaluate import exact_distribution
from .mdp import validate
from .wealth import DiscountedWealth, OrdinalWealth


@dataclass
class QuantileQuery:
    """What to optimize: tau, criterion, tolerance, optional bracket override."""
    tau: float
    criterion: str = "lower"
    epsilon: float = 1e-3
    horizon_mode: str = None          # "finite" | "infinite" | None = infer
    quantile_bounds: tuple = None     # (w_lo, w_hi) bracket override

    def check(self):
        if self.criterion not in ("lower", "upper"):
            raise ConfigurationError(
                f"criterion must be 'lower' or 'upper', got {self.criterion!r}")
        if self.criterion == "lower" and not 0.0 < self.tau <= 1.0:
            raise ConfigurationError(
                f"the lower criterion needs tau in (0, 1], got {self.tau}")
        if self.criterion == "upper" and not 0.0 <= self.tau < 1.0:
            raise ConfigurationError(
                f"the upper criterion needs tau in [0, 1), got {self.tau}")
        if not self.epsilon > 0.0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon}")
        if self.horizon_mode not in (None, "finite", "infinite"):
            raise ConfigurationError(
                f"horizon_mode must be 'finite' or 'infinite', got {self.horizon_mode!r}")
        if self.quantile_bounds is not None and len(self.quantile_bounds) != 2:
            raise ConfigurationError("quantile_bounds must be a (w_lo, w_hi) pair")


@dataclass
class IterationRecord:
    """One binary-search test: threshold, achieved probability, outcome."""
    w: object
    p: float
    accepted: bool


@dataclass
class SolveReport:
    """Everything a solve produced, including the per-iteration audit trail."""
    policy: object
    quantile: object           # the certified quantile estimate
    bracket: tuple             # final (w_lo, w_hi)
    iterations: int            # binary-search loop iterations
    log: list = field(default_factory=list)
    at_bottom: bool = False    # no test ever succeeded; quantile at range bottom
    extra_solves: int = 0      # endpoint probes / predecessor extraction
    sweeps: int = None         # total value-iteration sweeps (infinite mode)
    stationary: bool = False
    criterion: str = "lower"
    tau: float = None
    epsilon: float = None
    value_function: object = None


class _Solved:
    __slots__ = ("policy", "p", "vf")

    def __init__(self, policy, p, vf=None):
        self.policy = policy
        self.p = p
        self.vf = vf


def effective_epsilon(space, epsilon):
    """Ordinal distances are integers: brackets can never shrink below 1."""
    return max(epsilon, 1.0) if isinstance(space, OrdinalWealth) else epsilon


def iteration_bound(space, epsilon, w_lo=None, w_hi=None):
    """Worst-case binary-search iteration count for a bracket.

    ceil(log2(d(w_max, w_min) / eps)) on the real line; ceil(log2 m) for a
    finite ordinal space with m classes.
    """
    if isinstance(space, OrdinalWealth):
        return math.ceil(math.log2(len(space.classes)))
    lo = space.w_min if w_lo is None else w_lo
    hi = space.w_max if w_hi is None else w_hi
    d = space.distance(lo, hi)
    if d <= epsilon:
        return 0
    return math.ceil(math.log2(d / epsilon))


def solve_quantile(m, space, query, *, eps_conv=1e-6, max_sweeps=10000,
                   validate_mdp=True, keep_value_function=False):
    """Run the bracketing search and return a :class:`SolveReport`.

    Finite-horizon problems use functional backward induction per test
    point; infinite-horizon problems (uniformly signed rewards,
    undiscounted additive wealth, explicit quantile_bounds) use functional
    value iteration and return a stationary policy.
    """
    query.check()
    if validate_mdp:
        violations = validate(m)
        if violations:
            raise ValidationError(violations)

    infinite = m.horizon is None
    if query.horizon_mode is not None:
        actual = "infinite" if infinite else "finite"
        if query.horizon_mode != actual:
            raise ConfigurationError(
                f"query asks for a {query.horizon_mode}-horizon solve but the "
                f"MDP horizon is {actual}")

    ordinal = isinstance(space, OrdinalWealth)
    if infinite:
        if ordinal or isinstance(space, DiscountedWealth):
            raise ConfigurationError(
                "infinite-horizon solves need undiscounted additive wealth")
        if m.reward_sign() == "mixed":
            raise ConfigurationError(
                "infinite-horizon solves need uniformly signed rewards")
        if query.quantile_bounds is None:
            raise ConfigurationError(
                "infinite-horizon binary search needs explicit quantile_bounds: "
                "no finite bracket exists a priori, a bound on the optimal "
                "quantile must be supplied")

    bounds = query.quantile_bounds or (space.w_min, space.w_max)
    lo_k, hi_k = space.key(bounds[0]), space.key(bounds[1])
    if not lo_k <= hi_k:
        raise ConfigurationError(f"empty wealth bracket {bounds!r}")
    if not (math.isfinite(lo_k) and math.isfinite(hi_k)):
        raise ConfigurationError(
            f"wealth bracket {bounds!r} is not finite; pass quantile_bounds")

    strict = query.criterion == "lower"
    thr = 1.0 - query.tau
    eps = effective_epsilon(space, query.epsilon)
    total_sweeps = 0
    extra_solves = 0

    def run(wk):
        nonlocal total_sweeps
        w = space.unkey(wk)
        if infinite:
            pol, p, sweeps = value_iteration(m, space, w, strict,
                                             eps_conv=eps_conv,
                                             max_sweeps=max_sweeps)
            total_sweeps += sweeps
            return _Solved(pol, p)
        pol, p, vf = backward_induction(m, space, w, strict)
        return _Solved(pol, p, vf)

    def passes(p):
        return p > thr if query.criterion == "lower" else p >= thr

    def mids(lo, hi):
        if ordinal:
            i, j = int(lo), int(hi)
            return [float((i + j) // 2), float(-((i + j) // -2))]
        return [(lo + hi) / 2.0]

    log = []
    iterations = 0
    accepted = None
    any_fail = False
    w = min(mids(lo_k, hi_k))
    while hi_k - lo_k > eps:
        sol = run(w)
        ok = passes(sol.p)
        log.append(IterationRecord(space.unkey(w), sol.p, ok))
        iterations += 1
        if ok:
            lo_k = w
            accepted = sol
            w = max(mids(lo_k, hi_k))
        else:
            any_fail = True
            hi_k = w
            w = min(mids(lo_k, hi_k))

    at_bottom = False
    if not ordinal:
        if accepted is None:
            chosen = run(lo_k)
            extra_solves += 1
            at_bottom = True
        else:
            chosen = accepted
        qhat_k = lo_k
    elif query.criterion == "lower":
        if accepted is not None:
            # optimal quantile is the bracket top; extracting the optimal
            # policy needs one solve at its predecessor (= bracket bottom)
            qhat_k = hi_k
            chosen = run(space.key(space.prec(space.unkey(qhat_k))))
            extra_solves += 1
        else:
            probe = run(lo_k)
            extra_solves += 1
            ok0 = passes(probe.p)
            if hi_k > lo_k and ok0:
                qhat_k = hi_k
            else:
                qhat_k = lo_k
                at_bottom = not ok0
            chosen = probe   # lo_k is prec(qhat) in every subcase
    else:
        if accepted is not None and any_fail:
            qhat_k = lo_k
            chosen = accepted
        elif accepted is not None:
            # the top of the bracket was never tested: probe it
            if hi_k > lo_k:
                probe = run(hi_k)
                extra_solves += 1
                if passes(probe.p):
                    qhat_k, chosen = hi_k, probe
                else:
                    qhat_k, chosen = lo_k, accepted
            else:
                qhat_k, chosen = lo_k, accepted
        else:
            resolved = False
            if hi_k > lo_k and not any_fail:
                probe = run(hi_k)
                extra_solves += 1
                if passes(probe.p):
                    qhat_k, chosen = hi_k, probe
                    lo_k = hi_k
                    resolved = True
                else:
                    any_fail = True
            if not resolved:
                chosen = run(lo_k)
                extra_solves += 1
                qhat_k = lo_k
                at_bottom = True

    return SolveReport(
        policy=chosen.policy,
        quantile=space.unkey(qhat_k),
        bracket=(space.unkey(lo_k), space.unkey(hi_k)),
        iterations=iterations,
        log=log,
        at_bottom=at_bottom,
        extra_solves=extra_solves,
        sweeps=(total_sweeps if infinite else None),
        stationary=infinite,
        criterion=query.criterion,
        tau=query.tau,
        epsilon=query.epsilon,
        value_function=(chosen.vf if keep_value_function else None),
    )


def quantile_certificate(m, space, report, query):
    """Check the sufficient epsilon-optimality condition on a solve report.

    Recomputes the returned policy's exact wealth distribution and checks
    the bracket width together with F(w_lo) < tau (lower) or
    G(w_lo) >= 1 - tau (upper).  Reports flagged ``at_bottom`` carry no
    successful test to certify against; for those every policy's quantile
    lies inside the final bracket, so the check degrades to bracket width
    plus containment of the policy's own quantile.
    """
    if m.horizon is None:
        raise ConfigurationError(
            "the certificate recomputes an exact distribution and therefore "
            "needs a finite horizon")
    dist = exact_distribution(m, space, report.policy)
    lo, hi = report.bracket
    eps = effective_epsilon(space, query.epsilon)
    if space.distance(lo, hi) > eps:
        return False
    if report.at_bottom:
        qk = space.key(dist.quantile(query.tau, query.criterion))
        return space.key(lo) <= qk <= space.key(hi)
    if query.criterion == "lower":
        return dist.cdf(lo) < query.tau
    return dist.decumulative(lo) >= 1.0 - query.tau
