from fractions import Fraction
import random

import numpy as np
import pytest

from adelecovers.errors import NotFactorable, PlaceAlreadyPresent, PlaceNotPresent
from adelecovers.schwartz import (
    CrossProductElement,
    LocalWindow,
    ProductBSFunction,
    crossproduct_membership,
    extend,
    factor_out,
    indicator_Zp,
    is_factorable_at,
    scalar,
    sheaf_glue_check,
)


def table(windows, values):
    return ProductBSFunction(windows, np.array(values, dtype=object))


def test_window_cells():
    w = LocalWindow(2, 1, 1)
    assert w.size == 4
    assert [w.in_Zp(a) for a in range(4)] == [True, False, True, False]
    assert w.cell_of(Fraction(1, 2)) == 1
    assert w.cell_of(Fraction(1)) == 2
    assert w.cell_of(Fraction(1, 4)) is None


def test_extend_of_scalar_is_indicator():
    f = extend(scalar(1), 2)
    assert f == indicator_Zp(2)
    assert f({2: 5}) == 1
    assert f({2: Fraction(1, 2)}) == 0


def test_factorable_by_construction():
    g = table([LocalWindow(3, 1, 1)], [Fraction(i) for i in range(9)])
    assert is_factorable_at(extend(g, 2, LocalWindow(2, 2, 2)), 2)


def test_not_factorable_off_Zp():
    # support in 2^-1 Z_2 minus Z_2
    f = table([LocalWindow(2, 1, 0)], [0, 1])
    assert not is_factorable_at(f, 2)


def test_not_factorable_translation():
    # indicator of 1 + 2Z_2
    f = table([LocalWindow(2, 0, 1)], [0, 1])
    assert not is_factorable_at(f, 2)


def test_factor_out_examples():
    f = extend(indicator_Zp(3), 2)
    assert factor_out(f, 2) == indicator_Zp(3)
    delta = table([LocalWindow(3, 0, 1)], [1, 0, 0])
    assert factor_out(extend(delta, 2), 2) == delta
    with pytest.raises(NotFactorable):
        factor_out(table([LocalWindow(2, 0, 1)], [0, 1]), 2)


def test_extend_errors():
    with pytest.raises(PlaceAlreadyPresent):
        extend(indicator_Zp(2), 2)
    with pytest.raises(PlaceNotPresent):
        indicator_Zp(2).axis(3)


def test_extend_order_is_irrelevant():
    g = table([LocalWindow(5, 0, 1)], [1, 2, 3, 4, 5])
    assert extend(extend(g, 2), 3) == extend(extend(g, 3), 2)


def _random_table(rng, windows):
    shape = [w.size for w in windows]
    vals = np.array([Fraction(rng.randint(-2, 2)) for _ in range(int(np.prod(shape)))], dtype=object)
    return ProductBSFunction(windows, vals.reshape(shape))


def test_extend_factor_round_trip_random():
    rng = random.Random(7)
    for _ in range(50):
        g = _random_table(rng, [LocalWindow(3, rng.randint(0, 2), rng.randint(0, 2))])
        w2 = LocalWindow(2, rng.randint(0, 2), rng.randint(0, 2))
        f = extend(g, 2, w2)
        assert factor_out(f, 2) == g
        assert extend(factor_out(f, 2), 2, w2) == f


def test_linearity():
    rng = random.Random(11)
    for _ in range(20):
        g1 = _random_table(rng, [LocalWindow(3, 1, 1)])
        g2 = _random_table(rng, [LocalWindow(3, 0, 2)])
        f1, f2 = extend(g1, 2), extend(g2, 2, LocalWindow(2, 1, 2))
        c = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        combo = f1 + f2.scale(c)
        assert is_factorable_at(combo, 2)
        assert factor_out(combo, 2) == factor_out(f1, 2) + factor_out(f2, 2).scale(c)


def test_refinement_preserves_values():
    rng = random.Random(3)
    f = _random_table(rng, [LocalWindow(2, 1, 1), LocalWindow(3, 0, 1)])
    g = f.refine(LocalWindow(2, 2, 2))
    for x in (Fraction(1, 2), Fraction(3, 4), Fraction(5), Fraction(7, 3)):
        for y in (Fraction(0), Fraction(1), Fraction(2, 9)):
            assert f({2: x, 3: y}) == g({2: x, 3: y})


def test_twist_matches_pointwise_evaluation():
    rng = random.Random(5)
    f = _random_table(rng, [LocalWindow(2, 1, 1), LocalWindow(3, 1, 1)])
    for q in (2, 3, Fraction(1, 2), Fraction(2, 3), 6, -1):
        t = f.twisted(q)
        for x in (Fraction(a, b) for a in range(-4, 5) for b in (1, 2, 3, 4, 6)):
            for y in (Fraction(0), Fraction(1, 3), Fraction(4), Fraction(5, 2)):
                assert t({2: x, 3: y}) == f.with_places([2, 3])({2: x / q, 3: y / q})


def test_glue_examples():
    full = extend(extend(scalar(1), 2), 3)
    assert sheaf_glue_check(full, [[2], [3]]).consistent
    f = extend(table([LocalWindow(2, 0, 1)], [0, 1]), 3)
    check = sheaf_glue_check(f, [[2], [3]])
    assert (check.premise, check.member, check.consistent) == (False, False, True)


def test_glue_random_tables_over_three_places():
    rng = random.Random(13)
    for _ in range(100):
        windows = [LocalWindow(p, rng.randint(0, 1), rng.randint(0, 1)) for p in (2, 3, 5)]
        f = _random_table(rng, windows)
        for v in rng.sample([2, 3, 5], rng.randint(0, 2)):
            f = extend(factor_out_any(f, v), v)
        check = sheaf_glue_check(f, [[2, 3], [2, 5]])
        assert check.consistent


def factor_out_any(f, v):
    """Drop place v by restricting to x_v = 0."""
    ax = f.axis(v)
    vals = np.take(f.values, 0, axis=ax)
    return ProductBSFunction(f.windows[:ax] + f.windows[ax + 1 :], np.array(vals, dtype=object))


def test_crossproduct_membership_examples():
    base = extend(extend(scalar(1), 2), 3)
    assert crossproduct_membership(CrossProductElement({1: base}), [2, 3])
    assert not crossproduct_membership(CrossProductElement({5: base}), [2, 3])
    assert crossproduct_membership(CrossProductElement({-1: scalar(1)}), [])
    assert not crossproduct_membership(CrossProductElement({2: scalar(1)}), [])


def test_crossproduct_product_is_member():
    rng = random.Random(17)
    for _ in range(10):
        f = extend(_random_table(rng, [LocalWindow(3, 1, 1)]), 2)
        h = extend(_random_table(rng, [LocalWindow(3, 0, 1)]), 2)
        a = CrossProductElement({2: f, 1: indicator_Zp(2)})
        b = CrossProductElement({Fraction(1, 3): h, -6: f})
        assert crossproduct_membership(a, [2, 3]) and crossproduct_membership(b, [2, 3])
        assert crossproduct_membership(a * b, [2, 3])


def test_crossproduct_twisted_law():
    f = indicator_Zp(2)
    h = table([LocalWindow(2, 0, 1)], [1, 0])  # indicator of 2Z_2
    prod = CrossProductElement({2: f}) * CrossProductElement({3: h})
    # f · (h ∘ 2^-1) = 1_{Z_2} · 1_{4Z_2}
    expected = table([LocalWindow(2, 0, 2)], [1, 0, 0, 0])
    assert prod.terms.keys() == {6}
    assert prod.terms[6] == expected


def test_json_round_trip():
    f = table([LocalWindow(2, 1, 0), LocalWindow(3, 0, 1)], [[1, 0, Fraction(1, 2)], [0, 0, 3]])
    assert ProductBSFunction.from_json(f.to_json()) == f


def _brute_factorable(f, v):
    """Search every Z_v slice of f as a candidate factor g and test f = 1_{Z_v} ⊗ g cell by cell."""
    ax = f.axis(v)
    w = f.windows[ax]
    vals = np.moveaxis(f.values, ax, 0)
    inside = [a for a in range(w.size) if a % v**w.outer == 0]
    for a in inside:
        g = vals[a]
        if all(np.array_equal(vals[b], g if b in inside else np.zeros_like(g)) for b in range(w.size)):
            return True
    return False


def test_factorability_on_largest_grid_planted_and_perturbed():
    rng = random.Random(29)
    w2, w3 = LocalWindow(2, 2, 2), LocalWindow(3, 2, 2)
    for v, wv, wo in ((2, w2, w3), (3, w3, w2)):
        for _ in range(40):
            g = _random_table(rng, [wo]).values
            g = np.vectorize(lambda x: Fraction(int(x != 0)), otypes=[object])(g)
            f = extend(ProductBSFunction([wo], g), v, wv)
            assert is_factorable_at(f, v) and _brute_factorable(f, v)
            vals = np.array(f.values, dtype=object)
            idx = tuple(rng.randrange(n) for n in vals.shape)
            vals[idx] = 1 - vals[idx]
            broken = ProductBSFunction(f.windows, vals)
            assert is_factorable_at(broken, v) == _brute_factorable(broken, v)
