import pytest
from hypothesis import given, strategies as st

from qmdp import (AdditiveWealth, ConfigurationError, DiscountedWealth, Mdp,
                  OrdinalWealth, UnsupportedOperationError)

finite_floats = st.floats(min_value=-1e6, max_value=1e6,
                          allow_nan=False, allow_infinity=False)


def make_space(kind):
    if kind == "additive":
        return AdditiveWealth(-10, 10)
    if kind == "discounted":
        return DiscountedWealth(0.9, -10, 10)
    table = {c: {"up": "w%d" % min(int(c[1]) + 1, 5), "stay": c}
             for c in ("w1", "w2", "w3", "w4", "w5")}
    return OrdinalWealth(["w1", "w2", "w3", "w4", "w5"], table)


# -- accumulate -------------------------------------------------------------

def test_additive_accumulate_cancels():
    sp = AdditiveWealth(-5, 5)
    assert sp.accumulate(sp.accumulate(0.0, 1.0, 0), -1.0, 1) == 0.0


def test_discounted_accumulate_two_steps():
    sp = DiscountedWealth(0.9)
    assert sp.accumulate(sp.accumulate(0.0, 1.0, 0), 1.0, 1) == 1.9


def test_additive_bounds_from_mdp():
    # horizon 5 with rewards spanning [0, 1] gives w_max = 5
    m = Mdp(2, 1, [[[(1, 1.0)]], [[(0, 1.0)]]],
            {"kind": "sa", "values": [[1.0], [0.0]]}, 0, 5)
    sp = AdditiveWealth.for_mdp(m)
    assert sp.w_max == 5.0
    assert sp.w_min == 0.0


def test_discounted_bounds_geometric():
    m = Mdp(2, 1, [[[(1, 1.0)]], [[(0, 1.0)]]],
            {"kind": "sa", "values": [[1.0], [1.0]]}, 0, 3)
    sp = DiscountedWealth.for_mdp(m, 0.5)
    assert sp.w_max == pytest.approx(1 + 0.5 + 0.25)


def test_ordinal_accumulate_table():
    sp = make_space("ordinal")
    assert sp.accumulate("w2", "up") == "w3"
    assert sp.accumulate("w5", "up") == "w5"
    assert sp.accumulate("w3", "stay") == "w3"


def test_ordinal_accumulate_needs_table():
    sp = OrdinalWealth(["a", "b"])
    with pytest.raises(ConfigurationError):
        sp.accumulate("a", "up")


def test_ordinal_accumulate_rejects_unknown_label():
    sp = make_space("ordinal")
    with pytest.raises(ConfigurationError):
        sp.accumulate("w1", "sideways")


def test_numeric_accumulate_rejects_labels():
    with pytest.raises(ConfigurationError):
        AdditiveWealth(-1, 1).accumulate(0.0, "up")
    with pytest.raises(ConfigurationError):
        DiscountedWealth(0.5).accumulate(0.0, "up")


@given(st.lists(finite_floats, min_size=1, max_size=8))
def test_additive_fold_matches_sum(rewards):
    sp = AdditiveWealth()
    w = sp.w0
    for t, r in enumerate(rewards):
        w = sp.accumulate(w, r, t)
    assert w == pytest.approx(sum(rewards), abs=1e-6)


# -- compare / distance ------------------------------------------------------

@pytest.mark.parametrize("kind", ["additive", "discounted", "ordinal"])
def test_compare_reflexive_and_total(kind):
    sp = make_space(kind)
    if kind == "ordinal":
        values = sp.classes
    else:
        values = [-1.0, 0.0, 1.9, 3.5]
    for w in values:
        assert sp.compare(w, w) == 0
    for w in values:
        for w2 in values:
            assert sp.compare(w, w2) == -sp.compare(w2, w)
            assert sp.compare(w, w2) in (-1, 0, 1)


def test_compare_examples():
    sp = make_space("ordinal")
    assert sp.compare("w1", "w2") == -1
    assert AdditiveWealth().compare(-1.0, 1.9) == -1


@pytest.mark.parametrize("kind", ["additive", "ordinal"])
def test_distance_symmetry_identity(kind):
    sp = make_space(kind)
    values = sp.classes if kind == "ordinal" else [-2.0, 0.0, 1.5]
    for w in values:
        assert sp.distance(w, w) == 0
        for w2 in values:
            assert sp.distance(w, w2) == sp.distance(w2, w)


def test_ordinal_distance_is_index_gap():
    sp = make_space("ordinal")
    for i, w in enumerate(sp.classes):
        for j, w2 in enumerate(sp.classes):
            assert sp.distance(w, w2) == abs(j - i)


@given(st.lists(finite_floats, min_size=3, max_size=3))
def test_distance_consistent_with_order(ws):
    sp = AdditiveWealth()
    a, b, c = sorted(ws)
    assert sp.distance(a, c) >= max(sp.distance(a, b), sp.distance(b, c)) - 1e-12


# -- mid ----------------------------------------------------------------------

def test_numeric_mid():
    sp = AdditiveWealth()
    assert sp.mid(0.0, 5.0) == [2.5]
    assert sp.mid(1.5, 1.5) == [1.5]


def test_ordinal_mid():
    sp = make_space("ordinal")
    assert sp.mid("w1", "w4") == ["w2", "w3"]
    assert sp.mid("w1", "w3") == ["w2"]
    assert sp.mid("w2", "w2") == ["w2"]


def test_mid_requires_ordered_arguments():
    with pytest.raises(ValueError):
        AdditiveWealth().mid(2.0, 1.0)
    with pytest.raises(ValueError):
        make_space("ordinal").mid("w3", "w1")


def test_mid_minimizes_max_distance_ordinal():
    # exhaustive check over every pair of a 5-class space
    sp = make_space("ordinal")
    for i, w in enumerate(sp.classes):
        for j in range(i, len(sp.classes)):
            w2 = sp.classes[j]
            mids = sp.mid(w, w2)
            best = min(max(sp.distance(w, c), sp.distance(w2, c))
                       for c in sp.classes)
            for mid in mids:
                assert max(sp.distance(w, mid), sp.distance(w2, mid)) == best


@given(finite_floats, finite_floats)
def test_mid_minimizes_max_distance_numeric(a, b):
    sp = AdditiveWealth()
    lo, hi = min(a, b), max(a, b)
    (mid,) = sp.mid(lo, hi)
    half = sp.distance(lo, hi) / 2
    assert max(sp.distance(lo, mid), sp.distance(hi, mid)) <= half + 1e-9


# -- prec -----------------------------------------------------------------------

def test_prec_ordinal():
    sp = make_space("ordinal")
    assert sp.prec("w3") == "w2"
    assert sp.prec("w2") == "w1"
    assert sp.prec("w1") == "w1"


@pytest.mark.parametrize("kind", ["additive", "discounted"])
def test_prec_unsupported_on_numeric(kind):
    with pytest.raises(UnsupportedOperationError):
        make_space(kind).prec(0.0)


# -- configuration ---------------------------------------------------------------

def test_ordinal_space_validation():
    with pytest.raises(ConfigurationError):
        OrdinalWealth([])
    with pytest.raises(ConfigurationError):
        OrdinalWealth(["a", "a"])
    with pytest.raises(ConfigurationError):
        OrdinalWealth(["a", "b"], w0="c")


def test_gamma_validation():
    with pytest.raises(ConfigurationError):
        DiscountedWealth(0.0)
    with pytest.raises(ConfigurationError):
        DiscountedWealth(1.5)
    DiscountedWealth(1.0)   # gamma = 1 is allowed


def test_bounds_validation():
    with pytest.raises(ConfigurationError):
        AdditiveWealth(1.0, 0.0)


def test_ordinal_w0_default_and_override():
    table = {"a": {"r": "b"}, "b": {"r": "b"}}
    sp = OrdinalWealth(["a", "b"], table)
    assert sp.w0 == "a"
    sp2 = OrdinalWealth(["a", "b"], table, w0="b")
    assert sp2.w0 == "b"
