"""Piecewise-constant functions of wealth and the algebra the functional DP needs.

A :class:`StepFunction` maps wealth keys (floats; class indices for ordinal
spaces) to reals.  It is encoded as a base value plus an ordered list of
cuts ``(threshold, inclusive, value)``: the function takes ``value`` from
the threshold (at it when inclusive, strictly after it otherwise) up to the
next cut.  Cuts are ordered by the composite key ``(threshold, side)`` with
the inclusive side sorting first, so an atom — a distinct value at a single
wealth — is two cuts at the same threshold.

All target utilities are indicators, and none of the operations below
(shift, convex combination, upper envelope) introduce slopes, so the
piecewise-constant subclass of piecewise-linear functions is closed under
the whole backward-induction update.

Canonical form: thresholds within ``THRESH_TOL`` of the same side merge
(first position, last value wins), then cuts whose value matches the
preceding piece within ``VALUE_TOL`` are dropped.  Two functions that are
pointwise equal have identical encodings.
"""

import numpy as np

THRESH_TOL = 1e-9   # threshold merge, absorbs float noise from discounted shifts
VALUE_TOL = 1e-12   # adjacent-piece value merge


def _as_cut_arrays(x, inclusive, v):
    x = np.asarray(x, dtype=np.float64).ravel()
    inc = np.asarray(inclusive).ravel().astype(bool)
    v = np.asarray(v, dtype=np.float64).ravel()
    if not (len(x) == len(inc) == len(v)):
        raise ValueError("threshold/inclusive/value arrays must have equal length")
    return x, np.where(inc, 0, 1).astype(np.uint8), v


def _merge_thresholds(x, e, v):
    """Collapse cuts closer than THRESH_TOL on the same side (single pass).

    Keeps the first (smallest) threshold of each run and the value after
    the run's last cut.  A run's successor is guaranteed to sit more than
    THRESH_TOL above the kept representative, so one pass reaches a fixpoint.
    """
    if len(x) < 2:
        return x, e, v
    keep = np.empty(len(x), dtype=bool)
    keep[0] = True
    keep[1:] = (np.diff(x) > THRESH_TOL) | (e[1:] != e[:-1])
    if keep.all():
        return x, e, v
    gid = np.cumsum(keep) - 1
    last = np.empty(gid[-1] + 1, dtype=np.intp)
    last[gid] = np.arange(len(x))
    first = np.flatnonzero(keep)
    return x[first], e[first], v[last]


def _merge_values(base, x, e, v, tol):
    """Drop cuts that do not change the value by more than tol (to fixpoint)."""
    while len(v):
        prev = np.concatenate(([base], v[:-1]))
        keep = np.abs(v - prev) > tol
        if keep.all():
            break
        x, e, v = x[keep], e[keep], v[keep]
    return x, e, v


class StepFunction:
    """Canonical piecewise-constant map from wealth keys to reals."""

    __slots__ = ("base", "x", "e", "v")

    def __init__(self, base, thresholds=(), inclusive=(), values=()):
        x, e, v = _as_cut_arrays(thresholds, inclusive, values)
        if len(x):
            order = np.lexsort((e, x))
            x, e, v = x[order], e[order], v[order]
        x, e, v = _merge_thresholds(x, e, v)
        base = float(base)
        x, e, v = _merge_values(base, x, e, v, VALUE_TOL)
        self.base = base
        self.x = x
        self.e = e
        self.v = v

    @classmethod
    def constant(cls, value):
        return cls(value)

    @classmethod
    def from_pieces(cls, base, pieces):
        """Build from an iterable of (threshold, inclusive, value) tuples."""
        pieces = list(pieces)
        if not pieces:
            return cls(base)
        x, inc, v = zip(*pieces)
        return cls(base, x, inc, v)

    # -- introspection --------------------------------------------------

    @property
    def base_value(self):
        return self.base

    @property
    def pieces(self):
        return [(float(x), bool(e == 0), float(v))
                for x, e, v in zip(self.x, self.e, self.v)]

    def __len__(self):
        return len(self.x)

    def __eq__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (self.base == other.base
                and np.array_equal(self.x, other.x)
                and np.array_equal(self.e, other.e)
                and np.array_equal(self.v, other.v))

    __hash__ = None

    def __repr__(self):
        return f"StepFunction(base={self.base}, pieces={self.pieces})"

    # -- evaluation ------------------------------------------------------

    def _locate(self, w):
        """Index into [base]+values of the piece active at each wealth in w."""
        w = np.asarray(w, dtype=np.float64)
        n_lt = np.searchsorted(self.x, w, side="left")
        n_le = np.searchsorted(self.x, w, side="right")
        pinc = np.concatenate(([0], np.cumsum(self.e == 0)))
        return n_lt + (pinc[n_le] - pinc[n_lt])

    def __call__(self, w):
        return float(self._ext_values()[self._locate(w)])

    def eval_many(self, w):
        return self._ext_values()[self._locate(w)]

    def _ext_values(self):
        return np.concatenate(([self.base], self.v))


def target_utility(w, strict):
    """Indicator utility of wealths above ``w``.

    ``strict=True`` gives the lower-quantile target (1 exactly on wealths
    strictly above w); ``strict=False`` the upper-quantile target (1 on
    wealths at or above w).
    """
    return StepFunction(0.0, [w], [not strict], [1.0])


def _sweep(fs):
    """Merged cut partition of several step functions.

    Returns ``(x, e, vals)`` where vals has shape (len(fs), n_cuts + 1):
    column 0 is each function's value on the base segment (below every
    cut), column k+1 its value on the segment opened by merged cut k.
    """
    xs = np.concatenate([f.x for f in fs])
    es = np.concatenate([f.e for f in fs])
    origin = np.concatenate([np.full(len(f.x), j, dtype=np.intp)
                             for j, f in enumerate(fs)])
    order = np.lexsort((origin, es, xs))
    xs, es, origin = xs[order], es[order], origin[order]
    n = len(xs)
    vals = np.empty((len(fs), n + 1))
    for j, f in enumerate(fs):
        idx = np.zeros(n + 1, dtype=np.intp)
        np.cumsum(origin == j, out=idx[1:])
        vals[j] = f._ext_values()[idx]
    if n:
        # identical cut keys from different inputs open empty segments;
        # keep only the last of each run (all inputs counted past it)
        last = np.empty(n, dtype=bool)
        last[:-1] = (xs[1:] != xs[:-1]) | (es[1:] != es[:-1])
        last[-1] = True
        if not last.all():
            cols = np.concatenate(([0], np.flatnonzero(last) + 1))
            return xs[last], es[last], vals[:, cols]
    return xs, es, vals


def combine(terms):
    """Pointwise convex combination of step functions.

    ``terms`` is an iterable of (weight, StepFunction).  Weights must be
    nonnegative and sum to 1 within 1e-9.
    """
    terms = list(terms)
    weights = np.array([t[0] for t in terms], dtype=np.float64)
    fs = [t[1] for t in terms]
    if np.any(weights < -1e-12):
        raise ValueError(f"combine weights must be nonnegative, got {weights}")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError(f"combine weights must sum to 1, got {weights.sum()!r}")
    x, e, vals = _sweep(fs)
    out = weights @ vals
    return StepFunction(out[0], x, e == 0, out[1:])


def pointwise_max(fs):
    """Upper envelope of step functions plus its argmax structure.

    Returns ``(envelope, argmax)`` where argmax is an :class:`ActionMap`
    recording, on each maximal interval of constancy, the smallest input
    index attaining the maximum.
    """
    fs = list(fs)
    if not fs:
        raise ValueError("pointwise_max needs at least one function")
    x, e, vals = _sweep(fs)
    env = vals.max(axis=0)
    arg = vals.argmax(axis=0)   # first (lowest) index on ties
    return (StepFunction(env[0], x, e == 0, env[1:]),
            ActionMap(arg[0], x, e == 0, arg[1:]))


def sup_distance(f, g):
    """Exact sup-norm distance over the merged threshold partition."""
    _, _, vals = _sweep([f, g])
    if vals.shape[1] == 0:
        return abs(f.base - g.base)
    return float(np.abs(vals[0] - vals[1]).max())


def restrict(f, lo=None, hi=None):
    """Collapse cut structure outside [lo, hi].

    The result agrees with f on [lo, hi] and is constant beyond it; use it
    when callers are known never to evaluate outside the window (e.g. the
    reachable wealth range of a sweep).
    """
    x, e, v, base = f.x, f.e, f.v, f.base
    if hi is not None:
        keep = (x < hi) | ((x == hi) & (e == 0))
        x, e, v = x[keep], e[keep], v[keep]
    if lo is not None:
        base = f(lo)
        keep = (x > lo) | ((x == lo) & (e == 1))
        x, e, v = x[keep], e[keep], v[keep]
    return StepFunction(base, x, e == 0, v)


def shift(f, r, t, space):
    """Pull back f through wealth accumulation: g(w) = f(accumulate(w, r, t)).

    Numeric spaces translate every threshold by the accumulation increment
    (inclusivity preserved); ordinal spaces evaluate f through the
    class-transition table.
    """
    delta = space.shift_delta(r, t)
    if delta is None:
        moves = np.asarray(space.move_table(r), dtype=np.float64)
        vals = f.eval_many(moves)
        change = np.flatnonzero(vals[1:] != vals[:-1]) + 1
        return StepFunction(vals[0], change.astype(np.float64),
                            np.ones(len(change), dtype=bool), vals[change])
    if delta == 0.0:
        return f
    return StepFunction(f.base, f.x - delta, f.e == 0, f.v)


class ActionMap:
    """Piecewise-constant map from wealth keys to integer action indices.

    Shares the cut conventions of :class:`StepFunction`; adjacent intervals
    with equal actions are merged exactly.
    """

    __slots__ = ("base", "x", "e", "a")

    def __init__(self, base, thresholds=(), inclusive=(), actions=()):
        x, e, a = _as_cut_arrays(thresholds, inclusive, actions)
        a = a.astype(np.int64)
        if len(x):
            order = np.lexsort((e, x))
            x, e, a = x[order], e[order], a[order]
        x, e, a = _merge_thresholds(x, e, a)
        base = int(base)
        x, e, a = _merge_values(base, x, e, a, 0)
        self.base = base
        self.x = x
        self.e = e
        self.a = a.astype(np.int64)

    @classmethod
    def constant(cls, action):
        return cls(action)

    def _locate(self, w):
        w = np.asarray(w, dtype=np.float64)
        n_lt = np.searchsorted(self.x, w, side="left")
        n_le = np.searchsorted(self.x, w, side="right")
        pinc = np.concatenate(([0], np.cumsum(self.e == 0)))
        return n_lt + (pinc[n_le] - pinc[n_lt])

    def action(self, w):
        return int(self._ext()[self._locate(w)])

    def action_many(self, w):
        return self._ext()[self._locate(w)]

    def _ext(self):
        return np.concatenate(([self.base], self.a))

    def intervals(self):
        """[(from_threshold_or_None, inclusive_from, action)] partition."""
        out = [(None, True, int(self.base))]
        out.extend((float(x), bool(e == 0), int(a))
                   for x, e, a in zip(self.x, self.e, self.a))
        return out

    def __eq__(self, other):
        if not isinstance(other, ActionMap):
            return NotImplemented
        return (self.base == other.base
                and np.array_equal(self.x, other.x)
                and np.array_equal(self.e, other.e)
                and np.array_equal(self.a, other.a))

    __hash__ = None

    def __repr__(self):
        return f"ActionMap({self.intervals()})"
