"""Truncated logarithmic transseries with exactness frontiers.

A series is a finite ordered map from exponent keys to coefficients, plus a
truncation grid and an *exact frontier*: every stored coefficient whose key
is lex-below the frontier is guaranteed exact.  Each operation recomputes the
output frontier conservatively: the min of the operand frontiers shifted by
the other operand's minimal key, the first key lost to truncation, and the
grid-implied frontier (z_cap, 0).

Supports may contain keys <= 0 (the ambient algebra allows constants,
negative log exponents and negative powers); shape preconditions of the
normalization pipeline are checked where they are needed, not here.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from . import blocks as _blocks
from .coeffs import (
    EXACT,
    FLOAT,
    binomial,
    c_add,
    c_from,
    c_is_zero,
    c_mul,
    c_neg,
    c_pow_rational,
    c_scale,
    c_zero,
)
from .errors import DepthOverflowError, EmptySeriesError, ShapeError
from .keys import Cut, Key, front_zscale, min_key, zero_key


@dataclass(frozen=True)
class TruncationGrid:
    """Caps for stored data: z-order frontier, per-block term count, depth.

    `ell_stop` bounds the number of summed powers in pure-log geometric
    expansions (their tail is recorded in the frontier, never trusted).
    """

    z_cap: Fraction
    block_cap: int = 10
    depth: int = 1
    ell_stop: int = 16

    def __post_init__(self):
        object.__setattr__(self, "z_cap", Fraction(self.z_cap))
        if self.z_cap <= 0 or self.block_cap <= 0 or self.depth < 0:
            raise ValueError("truncation caps must be positive")

    def trunc_key(self) -> Cut:
        """The grid-implied frontier: the lex-infimum below everything dropped."""
        return Cut(self.z_cap)

    def with_depth(self, depth: int) -> "TruncationGrid":
        return replace(self, depth=depth)


def merge_grids(a: TruncationGrid, b: TruncationGrid) -> TruncationGrid:
    depth = max(a.depth, b.depth)
    return TruncationGrid(
        z_cap=min(a.z_cap, b.z_cap),
        block_cap=min(a.block_cap, b.block_cap),
        depth=depth,
        ell_stop=min(a.ell_stop, b.ell_stop),
    )


class TransSeries:
    """Immutable-by-convention truncated logarithmic transseries."""

    __slots__ = ("depth", "mode", "grid", "terms", "frontier")

    def __init__(self, depth, mode, grid, terms, frontier):
        self.depth = depth
        self.mode = mode
        self.grid = grid
        self.terms = terms
        self.frontier = frontier

    # -- inspection ---------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def coeff(self, key: Key):
        if key.depth > self.depth:
            if any(n != 0 for n in key.l[self.depth :]):
                return c_zero(self.mode)
            key = Key(key.z, key.l[: self.depth])
        return self.terms.get(key.pad(self.depth), c_zero(self.mode))

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, TransSeries)
            and self.depth == other.depth
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(frozenset(self.terms))

    def __repr__(self):
        from .printer import format_series

        return f"<TransSeries {format_series(self)}>"

    # -- convenience operators ----------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return negate(self)


def make_series(terms, grid: TruncationGrid, mode=EXACT, frontier_candidates=()):
    """Canonicalize: pad keys, prune zeros, apply caps, settle the frontier."""
    depth = grid.depth
    merged: dict[Key, object] = {}
    for key, c in terms.items() if isinstance(terms, dict) else terms:
        if key.depth > depth:
            raise DepthOverflowError(
                f"key of depth {key.depth} exceeds configured depth {depth}"
            )
        key = key.pad(depth)
        c = c_from(c, mode)
        if key in merged:
            merged[key] = c_add(merged[key], c)
        else:
            merged[key] = c

    frontier = grid.trunc_key()
    for cand in frontier_candidates:
        frontier = min_key(frontier, cand)

    by_block: dict[object, list[Key]] = {}
    for key, c in merged.items():
        if c_is_zero(c):
            continue
        if key.z >= grid.z_cap:
            continue
        by_block.setdefault(key.z, []).append(key)

    stored: dict[Key, object] = {}
    for _, keys in by_block.items():
        keys.sort()
        for key in keys[: grid.block_cap]:
            stored[key] = merged[key]
        if len(keys) > grid.block_cap:
            frontier = min_key(frontier, keys[grid.block_cap])

    return TransSeries(depth, mode, grid, stored, frontier)


def zero_series(grid: TruncationGrid, mode=EXACT) -> TransSeries:
    return make_series({}, grid, mode)


def monomial(key: Key, grid: TruncationGrid, mode=EXACT, coeff=1) -> TransSeries:
    return make_series({key.pad(grid.depth): c_from(coeff, mode)}, grid, mode)


def identity_series(grid: TruncationGrid, mode=EXACT) -> TransSeries:
    return monomial(Key(1, (0,) * grid.depth), grid, mode)


def embed(f: TransSeries, grid: TruncationGrid, mode=None) -> TransSeries:
    """Re-truncate f onto another grid (and optionally coerce the mode)."""
    mode = mode or f.mode
    terms = {k.pad(grid.depth): c_from(c, mode) for k, c in f.terms.items()}
    return make_series(terms, grid, mode, [f.frontier.pad(grid.depth)])


def _common(a: TransSeries, b: TransSeries):
    if a.depth == b.depth and a.grid == b.grid and a.mode == b.mode:
        return a, b
    grid = merge_grids(a.grid, b.grid)
    mode = FLOAT if FLOAT in (a.mode, b.mode) else EXACT
    return embed(a, grid, mode), embed(b, grid, mode)


# -- order, support, leading data -------------------------------------------


def ord_key(f: TransSeries) -> Key | None:
    """min Supp(f); None is the +infinity sentinel for the zero series."""
    if not f.terms:
        return None
    return min(f.terms)


def ord_z(f: TransSeries):
    if not f.terms:
        return None
    return min(k.z for k in f.terms)


def supp(f: TransSeries) -> list[Key]:
    return sorted(f.terms)


def supp_z(f: TransSeries) -> list:
    return sorted({k.z for k in f.terms})


def leading_term(f: TransSeries):
    if not f.terms:
        raise EmptySeriesError("leading term of the zero series")
    k = min(f.terms)
    return k, f.terms[k]


def leading_block(f: TransSeries):
    """The full alpha-block at alpha = ord_z(f), as (alpha, Block)."""
    if not f.terms:
        raise EmptySeriesError("leading block of the zero series")
    alpha = ord_z(f)
    terms = {k.l: c for k, c in f.terms.items() if k.z == alpha}
    block = _blocks.make_block(
        terms, depth=f.depth, mode=f.mode, cap=f.grid.block_cap, start=1
    )
    return alpha, block


def ord_for_frontier(f: TransSeries) -> Key:
    """A sound lower bound for the order of the (untruncated) series."""
    return min_key(ord_key(f), f.frontier)


# -- ring operations ---------------------------------------------------------


def add(a: TransSeries, b: TransSeries) -> TransSeries:
    a, b = _common(a, b)
    terms = dict(a.terms)
    for k, c in b.terms.items():
        if k in terms:
            terms[k] = c_add(terms[k], c)
        else:
            terms[k] = c
    return make_series(terms, a.grid, a.mode, [a.frontier, b.frontier])


def negate(a: TransSeries) -> TransSeries:
    return TransSeries(
        a.depth, a.mode, a.grid, {k: c_neg(c) for k, c in a.terms.items()}, a.frontier
    )


def sub(a: TransSeries, b: TransSeries) -> TransSeries:
    return add(a, negate(b))


def scale(a: TransSeries, q) -> TransSeries:
    """Multiply by a rational scalar (exactness-preserving)."""
    if q == 0:
        return make_series({}, a.grid, a.mode, [a.frontier])
    return TransSeries(
        a.depth, a.mode, a.grid, {k: c_scale(c, q) for k, c in a.terms.items()}, a.frontier
    )


def scale_coeff(a: TransSeries, c) -> TransSeries:
    terms = {k: c_mul(v, c) for k, v in a.terms.items()}
    return make_series(terms, a.grid, a.mode, [a.frontier])


def mul(a: TransSeries, b: TransSeries) -> TransSeries:
    a, b = _common(a, b)
    z_cap = a.grid.z_cap
    ab: dict = {}
    for k, c in a.terms.items():
        ab.setdefault(k.z, []).append((k.l, c))
    bb: dict = {}
    for k, c in b.terms.items():
        bb.setdefault(k.z, []).append((k.l, c))
    # accumulate per z-block so the rational z-sum is computed once per pair
    out: dict = {}
    for za, la in ab.items():
        for zb, lb in bb.items():
            z = za + zb
            if z >= z_cap:
                continue
            blk = out.get(z)
            if blk is None:
                blk = out[z] = {}
            for l1, c1 in la:
                for l2, c2 in lb:
                    l = tuple(x + y for x, y in zip(l1, l2))
                    c = c_mul(c1, c2)
                    if l in blk:
                        blk[l] = c_add(blk[l], c)
                    else:
                        blk[l] = c
    terms = {Key(z, l): c for z, blk in out.items() for l, c in blk.items()}
    cands = []
    oa, ob = ord_for_frontier(a), ord_for_frontier(b)
    cands.append(a.frontier + ob)
    cands.append(b.frontier + oa)
    return make_series(terms, a.grid, a.mode, cands)


def mul_monomial(a: TransSeries, key: Key, coeff=None) -> TransSeries:
    """Multiply by a single exact monomial; frontier shifts by the key."""
    key = key.pad(a.depth)
    terms = {}
    for k, c in a.terms.items():
        terms[k + key] = c if coeff is None else c_mul(c, coeff)
    return make_series(terms, a.grid, a.mode, [a.frontier + key])


def d_dz(f: TransSeries) -> TransSeries:
    """Termwise d/dz with d l_m/dz = (1/z) l_1...l_{m-1} l_m^2."""
    depth = f.depth
    terms: dict[Key, object] = {}

    def bump(key, c):
        if key in terms:
            terms[key] = c_add(terms[key], c)
        else:
            terms[key] = c

    for k, c in f.terms.items():
        if k.z != 0:
            bump(Key(k.z - 1, k.l), c_scale(c, k.z))
        for m in range(1, depth + 1):
            nm = k.l[m - 1]
            if nm == 0:
                continue
            shift = tuple(1 if j < m else 0 for j in range(depth))
            lk = tuple(k.l[j] + shift[j] for j in range(depth))
            bump(Key(k.z - 1, lk), c_scale(c, nm))
    front = f.frontier + Key(-1, (0,) * depth)
    return make_series(terms, f.grid, f.mode, [front])


# -- metric and weak-topology diagnostics ------------------------------------


def dist_z_info(a: TransSeries, b: TransSeries):
    """Power metric 2^(-ord_z(a-b)) with a status string.

    Status is "measured" when the leading difference is certified,
    "indistinguishable-at-frontier" when the series agree below both
    frontiers (the true metric is uncomputable beyond them), and
    "untrusted" when the leading difference sits at or above the frontier.
    """
    a, b = _common(a, b)
    diff = sub(a, b)
    if diff.is_zero():
        return 0.0, "indistinguishable-at-frontier"
    o = ord_z(diff)
    status = "measured" if min(diff.terms) < diff.frontier else "untrusted"
    return float(2.0 ** (-float(o))), status


def dist_z(a: TransSeries, b: TransSeries) -> float:
    return dist_z_info(a, b)[0]


def weak_delta(seq, key: Key):
    """Coefficient trajectory at `key` across a sequence of series."""
    return [s.coeff(key) for s in seq]


def agree_below_frontier(a: TransSeries, b: TransSeries) -> bool:
    a, b = _common(a, b)
    diff = sub(a, b)
    return diff.is_zero() or min(diff.terms) >= diff.frontier


# -- multiplicative structure -------------------------------------------------


def split_leading(f: TransSeries):
    """f = c * monomial(key) * (1 + v) with ord(v) > 0; returns (key, c, v)."""
    key, c = leading_term(f)
    rest = {k - key: cc for k, cc in f.terms.items() if k != key}
    shifted_front = f.frontier + (-key)
    from .coeffs import c_inv

    cinv = c_inv(c)
    v = make_series(
        {k: c_mul(cc, cinv) for k, cc in rest.items()}, f.grid, f.mode, [shifted_front]
    )
    return key, c, v


def sum_powers(v: TransSeries, coeff_of, grid: TruncationGrid, mode, prefactor=None):
    """Sigma_{i>=0} coeff_of(i) * v^i (optionally times prefactor), certified stop.

    Requires ord(v) > 0 (lex).  When the order of v has a z-component the sum
    stops once contributions pass z_cap; for pure-log v it stops after
    ell_stop powers and the first untrusted key is recorded in the frontier.
    """
    n0 = ord_for_frontier(v)
    if not n0.is_positive():
        raise ShapeError(f"power sum needs ord(v) > 0, got {n0!r}")
    base = zero_key(grid.depth) if prefactor is None else ord_for_frontier(prefactor)

    acc = zero_series(grid, mode)
    vp = monomial(zero_key(grid.depth), grid, mode)
    i = 0
    while True:
        if n0.z > 0:
            if base.z + i * n0.z >= grid.z_cap:
                break
        elif i > grid.ell_stop:
            break
        q = coeff_of(i)
        if q != 0:
            acc = add(acc, scale(vp, q))
        vp = mul(vp, v)
        i += 1
    penalty = base + n0.scale(i)
    if prefactor is not None:
        acc = mul(prefactor, acc)
    return make_series(acc.terms, grid, mode, [acc.frontier, penalty])


def log1p(v: TransSeries) -> TransSeries:
    """log(1 + v) = Sigma (-1)^(i+1) v^i / i, ord(v) > 0."""
    return sum_powers(
        v, lambda i: Fraction((-1) ** (i + 1), i) if i else Fraction(0), v.grid, v.mode
    )


def exp_minus_one(v: TransSeries) -> TransSeries:
    """exp(v) - 1 for ord(v) > 0."""
    fact = [Fraction(1)]

    def coeff(i):
        while len(fact) <= i:
            fact.append(fact[-1] / len(fact))
        return fact[i] if i else Fraction(0)

    return sum_powers(v, coeff, v.grid, v.mode)


def pow_rational(f: TransSeries, beta) -> TransSeries:
    """f^beta via the binomial series around the leading monomial.

    Fractional (or float-mode float) beta needs a log-free leading monomial,
    else the result would have fractional log exponents.
    """
    beta = Fraction(beta) if not isinstance(beta, float) else beta
    if f.is_zero():
        if beta == 0:
            return monomial(zero_key(f.grid.depth), f.grid, f.mode)
        raise EmptySeriesError("power of the zero series")
    key, c, v = split_leading(f)
    integral = isinstance(beta, Fraction) and beta.denominator == 1
    if integral:
        mkey = key.scale(int(beta))
    else:
        if any(n != 0 for n in key.l):
            raise ShapeError(
                "fractional power of a series with logarithms in its leading term"
            )
        mkey = Key(key.z * beta, key.l)
    cpow = c_pow_rational(c, beta)
    body = sum_powers(v, lambda i: binomial(beta, i), f.grid, f.mode)
    return mul_monomial(body, mkey, cpow)


def series_inverse(f: TransSeries) -> TransSeries:
    return pow_rational(f, Fraction(-1))
