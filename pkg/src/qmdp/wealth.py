"""Wealth-level algebra: how history values accumulate, compare, and measure distance.

A wealth space fixes the set of values histories can take, the accumulation
operation that folds a reward into the running wealth, a total order, a
distance, and bounds for the terminal wealth range.  Three kinds are
supported:

* ``AdditiveWealth`` — wealth is the running sum of numeric rewards.
* ``DiscountedWealth`` — wealth is the running gamma-discounted sum; the
  accumulation of reward ``r`` at (0-based) timestep ``t`` adds ``gamma**t * r``.
* ``OrdinalWealth`` — wealth is one of finitely many ordered classes
  ``w_1 < ... < w_m``; accumulation is a user-supplied class-transition table
  over (class, reward-label) pairs, distance is the index gap ``|j - i|``.

Internally every wealth value maps to a float *key* (the value itself for
numeric kinds, the class index for the ordinal kind) so that downstream
code can compare and sort wealths uniformly.  Public operations accept and
return public values (class labels for ordinal spaces).
"""

import math

import numpy as np

from .errors import ConfigurationError, UnsupportedOperationError

# Absolute tolerance used downstream when merging wealth atoms / step-function
# thresholds.  Comparisons inside this module are exact.
WEALTH_TOL = 1e-9


class WealthSpace:
    """Base class; concrete kinds implement the abstract hooks."""

    kind = None

    # -- public algebra ------------------------------------------------

    def accumulate(self, w, r, t=0):
        """Fold reward ``r`` taken at timestep ``t`` into wealth ``w``."""
        raise NotImplementedError

    def compare(self, w, w2):
        """Total order: -1 if w < w2, 0 if equal, +1 if w > w2."""
        k, k2 = self.key(w), self.key(w2)
        return (k > k2) - (k < k2)

    def distance(self, w, w2):
        """Order-consistent distance between two wealth values."""
        return abs(self.key(w) - self.key(w2))

    def mid(self, w, w2):
        """Set (list) of 1-2 mid-elements of the interval [w, w2].

        Requires w <= w2 under the space order.
        """
        if self.compare(w, w2) > 0:
            raise ValueError(f"mid() requires w <= w2, got {w!r} > {w2!r}")
        return self._mid(w, w2)

    def prec(self, w):
        """Immediate predecessor wealth (ordinal spaces only)."""
        raise UnsupportedOperationError(
            f"prec() is not defined on {self.kind} wealth spaces; it is only "
            "needed to extract exactly-optimal lower-quantile policies in the "
            "finite ordinal case"
        )

    # convenience comparisons
    def lt(self, w, w2):
        return self.compare(w, w2) < 0

    def le(self, w, w2):
        return self.compare(w, w2) <= 0

    def eq(self, w, w2):
        return self.compare(w, w2) == 0

    # -- key protocol (internal, used by the DP machinery) -------------

    def key(self, w):
        """Sortable float key of a public wealth value."""
        raise NotImplementedError

    def unkey(self, k):
        """Public wealth value of a key."""
        raise NotImplementedError

    def accumulate_key(self, k, r, t=0):
        """accumulate() on keys."""
        raise NotImplementedError

    def accumulate_keys(self, karr, r, t=0):
        """Vectorized accumulate_key over an array of keys.

        ``r`` is a scalar reward, an array aligned with ``karr`` (numeric
        kinds), or a single reward label (ordinal kind).
        """
        raise NotImplementedError

    def shift_delta(self, r, t):
        """Numeric kinds: the key increment of accumulating r at timestep t.

        Returns None for table-based (ordinal) spaces.
        """
        return None

    def _mid(self, w, w2):
        raise NotImplementedError

    def _check_numeric_reward(self, r):
        if not isinstance(r, (int, float)):
            raise ConfigurationError(
                f"{self.kind} wealth spaces accumulate numeric rewards, "
                f"got {r!r}"
            )
        return float(r)


class AdditiveWealth(WealthSpace):
    """Wealth = undiscounted sum of numeric rewards."""

    kind = "additive"

    def __init__(self, w_min=-math.inf, w_max=math.inf):
        if not w_min <= w_max:
            raise ConfigurationError(f"w_min {w_min} > w_max {w_max}")
        self.w0 = 0.0
        self.w_min = float(w_min)
        self.w_max = float(w_max)

    @classmethod
    def for_mdp(cls, mdp):
        """Bounds [T*r_min, T*r_max] of the terminal wealth range.

        Infinite-horizon MDPs get a half-infinite range depending on the
        reward sign (all-nonpositive rewards cannot push wealth above 0,
        all-nonnegative cannot push it below 0).
        """
        r_min, r_max = mdp.reward_bounds()
        if mdp.horizon is None:
            lo = 0.0 if r_min >= 0 else -math.inf
            hi = 0.0 if r_max <= 0 else math.inf
            return cls(lo, hi)
        return cls(mdp.horizon * r_min, mdp.horizon * r_max)

    def accumulate(self, w, r, t=0):
        return float(w) + self._check_numeric_reward(r)

    def key(self, w):
        return float(w)

    def unkey(self, k):
        return float(k)

    def accumulate_key(self, k, r, t=0):
        return k + r

    def accumulate_keys(self, karr, r, t=0):
        return karr + np.asarray(r, dtype=np.float64)

    def shift_delta(self, r, t):
        return self._check_numeric_reward(r)

    def _mid(self, w, w2):
        return [(float(w) + float(w2)) / 2.0]

    def __repr__(self):
        return f"AdditiveWealth(w_min={self.w_min}, w_max={self.w_max})"


class DiscountedWealth(WealthSpace):
    """Wealth = gamma-discounted sum; reward at timestep t contributes gamma**t * r."""

    kind = "discounted"

    def __init__(self, gamma, w_min=-math.inf, w_max=math.inf):
        if not 0.0 < gamma <= 1.0:
            raise ConfigurationError(f"gamma must be in (0, 1], got {gamma}")
        if not w_min <= w_max:
            raise ConfigurationError(f"w_min {w_min} > w_max {w_max}")
        self.gamma = float(gamma)
        self.w0 = 0.0
        self.w_min = float(w_min)
        self.w_max = float(w_max)

    @classmethod
    def for_mdp(cls, mdp, gamma):
        """Bounds from the geometric sum of T discounted extreme rewards."""
        if mdp.horizon is None:
            raise ConfigurationError(
                "discounted wealth bounds need a finite horizon; the "
                "infinite-horizon solver only supports undiscounted wealth"
            )
        r_min, r_max = mdp.reward_bounds()
        if gamma == 1.0:
            geo = float(mdp.horizon)
        else:
            geo = (1.0 - gamma ** mdp.horizon) / (1.0 - gamma)
        return cls(gamma, geo * r_min, geo * r_max)

    def accumulate(self, w, r, t=0):
        return float(w) + self.gamma ** t * self._check_numeric_reward(r)

    def key(self, w):
        return float(w)

    def unkey(self, k):
        return float(k)

    def accumulate_key(self, k, r, t=0):
        return k + self.gamma ** t * r

    def accumulate_keys(self, karr, r, t=0):
        return karr + self.gamma ** t * np.asarray(r, dtype=np.float64)

    def shift_delta(self, r, t):
        return self.gamma ** t * self._check_numeric_reward(r)

    def _mid(self, w, w2):
        return [(float(w) + float(w2)) / 2.0]

    def __repr__(self):
        return (f"DiscountedWealth(gamma={self.gamma}, w_min={self.w_min}, "
                f"w_max={self.w_max})")


class OrdinalWealth(WealthSpace):
    """Finitely many ordered wealth classes with table-based accumulation.

    ``classes`` lists the labels from least to most preferred.  The
    transition table maps (current class, reward label) to the next class;
    it must be total over the labels it is ever queried with.  Distance is
    the index gap, so mid-elements are the one or two middle classes.
    """

    kind = "ordinal"

    def __init__(self, classes, transition_table=None, w0=None):
        classes = list(classes)
        if not classes:
            raise ConfigurationError("ordinal wealth space needs at least one class")
        if len(set(classes)) != len(classes):
            raise ConfigurationError("ordinal wealth classes must be distinct")
        self.classes = classes
        self._index = {c: i for i, c in enumerate(classes)}
        self.transition_table = transition_table
        if w0 is None:
            w0 = classes[0]
        if w0 not in self._index:
            raise ConfigurationError(f"w0 {w0!r} is not a wealth class")
        self.w0 = w0
        self.w_min = classes[0]
        self.w_max = classes[-1]
        # index-level table, compiled lazily per reward label
        self._moves = {}

    def index(self, w):
        try:
            return self._index[w]
        except KeyError:
            raise ConfigurationError(f"{w!r} is not a wealth class") from None

    def label(self, i):
        return self.classes[int(i)]

    def move_table(self, r):
        """Index -> index map for reward label ``r`` (cached)."""
        if self.transition_table is None:
            raise ConfigurationError(
                "ordinal accumulation needs a class-transition table"
            )
        if r not in self._moves:
            moves = []
            for c in self.classes:
                row = self.transition_table.get(c)
                if row is None or r not in row:
                    raise ConfigurationError(
                        f"transition table has no entry for class {c!r}, "
                        f"reward label {r!r}"
                    )
                moves.append(self.index(row[r]))
            self._moves[r] = moves
        return self._moves[r]

    def accumulate(self, w, r, t=0):
        return self.label(self.move_table(r)[self.index(w)])

    def key(self, w):
        return float(self.index(w))

    def unkey(self, k):
        return self.label(int(round(k)))

    def accumulate_key(self, k, r, t=0):
        return float(self.move_table(r)[int(round(k))])

    def accumulate_keys(self, karr, r, t=0):
        moves = np.asarray(self.move_table(r), dtype=np.float64)
        return moves[np.asarray(karr, dtype=np.float64).astype(np.int64)]

    def prec(self, w):
        i = self.index(w)
        return self.classes[i - 1] if i > 0 else w

    def _mid(self, w, w2):
        i, j = self.index(w), self.index(w2)
        lo, hi = (i + j) // 2, -((i + j) // -2)
        if lo == hi:
            return [self.classes[lo]]
        return [self.classes[lo], self.classes[hi]]

    def __repr__(self):
        return f"OrdinalWealth({self.classes!r})"
