from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

from bottcher import blocks as B
from bottcher.coeffs import Exact
from bottcher.errors import ShapeError

F = Fraction


def blk(terms, depth=2, cap=8):
    return B.make_block(terms, depth, cap=cap, ell_stop=10)


def test_D1_examples():
    # D_m = l_m^2 d/dl_m: the definition sends l_1 to l_1^2
    assert B.D_m(blk({(1, 0): 1}), 1) == blk({(2, 0): 1})
    assert B.D_m(blk({(0, 0): 5}), 1).is_zero()
    assert B.D_m(blk({(2, 1): 1}), 1) == blk({(3, 1): 2})


def test_D2_and_domain():
    assert B.D_m(blk({(0, 3): 1}), 2) == blk({(0, 4): 3})
    with pytest.raises(ShapeError):
        B.D_m(blk({(1, 0): 1}), 2)  # uses l1, not in B_2


@given(st.dictionaries(st.tuples(st.integers(1, 4), st.integers(-2, 3)),
                       st.fractions(min_value=-2, max_value=2, max_denominator=3).filter(bool),
                       min_size=1, max_size=4))
def test_D1_raises_order(terms):
    r = blk({k: Exact.of(v) for k, v in terms.items()})
    dr = B.D_m(r, 1)
    if not dr.is_zero():
        assert B.ord_ell(dr, 1) >= B.ord_ell(r, 1) + 1


def test_dist_examples():
    a = blk({(1, 0): 1})
    b = blk({(1, 0): 1, (3, 0): 1})
    assert B.dist_ell(a, b, 1) == 2.0**-3
    assert B.dist_ell(a, a, 1) == 0.0


def test_classes():
    B.check_class(blk({(1, 0): 1}), "B_m+", 1)
    B.check_class(blk({(0, 1): 1}), "B_>=m+", 1)
    with pytest.raises(ShapeError):
        B.check_class(blk({(0, 1): 1}), "B_m+", 1)  # ord_l1 = 0
    with pytest.raises(ShapeError):
        B.check_class(blk({(-1, 0): 1}), "B_>=m+", 1)


def test_log_exp_roundtrip():
    v = blk({(1, 0): F(1, 2), (1, -1): F(1, 3), (0, 2): -1})
    w = B.block_log1p(v)
    back = B.block_exp_minus_one(w)
    d = B.block_sub(back, v)
    assert d.is_zero() or (d.frontier is not None and min(d.terms) >= d.frontier)


def test_inverse():
    r = blk({(0, 0): 2, (1, 0): 1})
    ri = B.block_inverse(r)
    prod = B.block_mul(r, ri)
    one = B.block_one(2, cap=8)
    d = B.block_sub(prod, one)
    assert d.is_zero() or (d.frontier is not None and min(d.terms) >= d.frontier)


def test_pow_rational_block():
    r = blk({(0, 0): 1, (1, 0): 1})
    half = B.block_pow_rational(r, F(1, 2))
    sq = B.block_mul(half, half)
    d = B.block_sub(sq, r)
    assert d.is_zero() or (d.frontier is not None and min(d.terms) >= d.frontier)


def test_log_images_of_pure_power():
    # l1 o z^2 = l1/2 exactly; l2 o z^2 = l2 sum (-log2 l2)^i
    imgs = B.log_images_of_power(F(2), None, 2, cap=8, ell_stop=8)
    assert imgs[0] == B.make_block({(1, 0): F(1, 2)}, 2, cap=8)
    e2 = imgs[1]
    l2log = Exact.log_of_rational(2)
    assert e2.coeff((0, 1)) == Exact.of(1)
    assert e2.coeff((0, 2)) == -l2log
    assert e2.coeff((0, 3)) == l2log * l2log
    assert all(k[0] == 0 for k in e2.terms)


def test_substitute_is_morphism():
    imgs = B.log_images_of_power(F(2), blk({(1, 0): 1}, depth=2), 2, cap=8, ell_stop=10)
    a = blk({(1, 0): 1, (0, 1): 2})
    b = blk({(2, -1): F(1, 3)})
    lhs = B.substitute(B.block_mul(a, b), imgs)
    rhs = B.block_mul(B.substitute(a, imgs), B.substitute(b, imgs))
    d = B.block_sub(lhs, rhs)
    assert d.is_zero() or (d.frontier is not None and min(d.terms) >= d.frontier)
