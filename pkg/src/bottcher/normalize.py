"""Fixed-point normalization of strongly hyperbolic logarithmic transseries.

Pipeline: reduce the leading coefficient/exponent if needed, remove the
same-z-order log block by the canonical prenormalization id + zS (a graded
solve of the multiplicative fixed-point equation in logarithmic form), then
Picard-iterate the Bottcher operator P_f(h) = z^(1/alpha) o h o f, whose
contraction factor 2^(-(alpha-1)(beta-1)) certifies the stopping index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import blocks as B
from .blocks import Block
from .coeffs import binomial, c_add, c_eq, c_from, c_is_zero, c_mul, c_scale
from .errors import PrenormalizationRequiredError, ShapeError
from .keys import Cut, Key, ell_key
from .series import (
    TransSeries,
    add,
    identity_series,
    leading_block,
    make_series,
    monomial,
    ord_z,
    sub,
)
from .compose import (
    STRONGLY_HYPERBOLIC,
    compose,
    compose_power,
    conjugate,
    is_parabolic,
    reduce_alpha,
    reduce_lambda,
    shape_of,
)


# -- the Bottcher operator ------------------------------------------------------


def _require_monic_power(f: TransSeries, want_alpha_above_one=True):
    shape = shape_of(f)
    if not c_eq(f.terms[min(f.terms)], c_from(1, f.mode)):
        raise ShapeError("leading coefficient must be 1 (apply reduce_lambda first)")
    if want_alpha_above_one and not shape.alpha > 1:
        raise ShapeError(
            f"alpha = {shape.alpha} <= 1; apply reduce_alpha / out of scope"
        )
    return shape


def bottcher_op(f: TransSeries, h: TransSeries) -> TransSeries:
    """P_f(h) = z^(1/alpha) o h o f on parabolic h."""
    shape = _require_monic_power(f)
    if not is_parabolic(h):
        raise ShapeError("Bottcher operator acts on parabolic series")
    alpha = shape.alpha
    inv_alpha = Fraction(1) / alpha if not isinstance(alpha, float) else 1.0 / alpha
    return compose_power(inv_alpha, compose(h, f))


def alpha_block(f: TransSeries):
    """(alpha, R) with f = z^alpha (1 + R) + higher blocks; R a pure block."""
    shape = _require_monic_power(f)
    alpha = shape.alpha
    terms = {}
    for k, c in f.terms.items():
        if k.z == alpha and any(n != 0 for n in k.l):
            terms[k.l] = c
    if isinstance(f.frontier, Cut):
        if f.frontier.z <= alpha:
            raise ShapeError("grid too small: the alpha block is entirely untrusted")
        fr = None
    elif f.frontier.z < alpha:
        raise ShapeError("grid too small: the alpha block is entirely untrusted")
    elif f.frontier.z == alpha:
        fr = f.frontier.l
    else:
        fr = None
    blk = B.make_block(
        terms, f.depth, f.mode, f.grid.block_cap, start=1,
        frontier_candidates=[fr] if fr is not None else (),
        ell_stop=f.grid.ell_stop,
    )
    return alpha, blk


def alpha_part_series(f: TransSeries) -> TransSeries:
    """z^alpha (1 + R_alpha): the same-z-order part the prenormalization sees."""
    alpha, _ = alpha_block(f)
    terms = {k: c for k, c in f.terms.items() if k.z == alpha}
    return make_series(terms, f.grid, f.mode, [f.frontier])


def bottcher_R_op(f: TransSeries, h: TransSeries) -> TransSeries:
    """R_f(h) = z^(1/alpha) o h o (z^alpha + z^alpha R_alpha)."""
    return bottcher_op(alpha_part_series(f), h)


# -- canonical prenormalization --------------------------------------------------


def solve_prenorm_W(r: Block, alpha) -> Block:
    """Unique solution of W = (1/alpha) log(1+R) + (1/alpha) W o sigma.

    sigma substitutes l_j -> l_j o (z^alpha (1+R)).  The equation is
    lex-triangular with diagonal factors 1 - alpha^-(n1+1) in (0,1), so it is
    solved term-by-term in ascending key order; contributions of a solved term
    to higher keys come from the off-diagonal part of its sigma-image.
    """
    alpha = Fraction(alpha)
    depth, mode, cap, es = r.depth, r.mode, r.cap, r.ell_stop
    inv_a = Fraction(1) / alpha
    images = B.log_images_of_power(alpha, r, depth, mode, cap, es)
    a0 = B.block_scale(B.block_log1p(r), inv_a)

    pending: dict[tuple, object] = dict(a0.terms)
    solved: dict[tuple, object] = {}
    frontier = a0.frontier
    budget = cap
    while pending and budget > 0:
        n = min(pending)
        b = pending.pop(n)
        diag = 1 - inv_a * alpha ** (-n[0])
        w_n = c_scale(b, Fraction(1) / diag)
        if c_is_zero(w_n):
            continue
        solved[n] = w_n
        budget -= 1
        sigma_n = B.substitute(
            B.make_block({n: 1}, depth, mode, cap, 1, ell_stop=es), images
        )
        if sigma_n.frontier is not None:
            frontier = B._lmin(frontier, sigma_n.frontier)
        for k, c in sigma_n.terms.items():
            if k == n:
                continue
            contrib = c_scale(c_mul(w_n, c), inv_a)
            pending[k] = contrib if k not in pending else c_add(pending[k], contrib)
    if pending:
        frontier = B._lmin(frontier, min(pending))
    return B.make_block(solved, depth, mode, cap, 1, [frontier], es)


def prenormalize(f: TransSeries) -> TransSeries:
    """The unique canonical phi_1 = id + zS removing the z^alpha log block."""
    alpha, r = alpha_block(f)
    depth, grid, mode = f.depth, f.grid, f.mode
    if r.is_zero():
        return identity_series(grid, mode)
    B.check_class(r, "B_>=m+", 1)
    w = solve_prenorm_W(r, alpha)
    s = B.block_exp_minus_one(w)
    terms = {Key(1, (0,) * depth): c_from(1, mode)}
    for lkey, c in s.terms.items():
        terms[Key(1, lkey)] = c
    cands = [Key(1, s.frontier)] if s.frontier is not None else []
    phi1 = make_series(terms, grid, mode, cands)
    return phi1


def prenorm_block_map(r: Block, t: Block, alpha, images=None) -> Block:
    """One weak-iteration step: T -> ((1+R)(1+T o sigma))^(1/alpha) - 1."""
    alpha_q = Fraction(alpha) if not isinstance(alpha, float) else alpha
    if images is None:
        images = B.log_images_of_power(alpha_q, r, r.depth, r.mode, r.cap, r.ell_stop)
    one = B.block_one(r.depth, r.mode, r.cap, r.ell_stop)
    inner = B.block_mul(
        B.block_add(one, r), B.block_add(one, B.substitute(t, images))
    )
    inv_a = Fraction(1) / Fraction(alpha_q) if not isinstance(alpha_q, float) else 1.0 / alpha_q
    powed = B.block_pow_rational(inner, inv_a) if not isinstance(alpha_q, float) else _float_block_pow(inner, inv_a)
    return B.block_sub(powed, one)


def _float_block_pow(r: Block, beta: float) -> Block:
    from .coeffs import c_pow_rational

    key, c, v = B.split_leading_block(r)
    body = B.block_sum_powers(v, lambda i: binomial(beta, i))
    return B.block_mul_monomial(
        body, tuple(int(x * beta) for x in key), c_pow_rational(c, beta)
    )


# -- the T/S/K operator triple ----------------------------------------------------


def apply_T_op(s: Block, r: Block, alpha) -> Block:
    """T_f(S) = S o z^alpha + (S o z^alpha) R - Sigma_{i>=1} binom(alpha,i) S^i."""
    alpha = Fraction(alpha)
    pure = B.log_images_of_power(alpha, None, s.depth, s.mode, s.cap, s.ell_stop)
    s_za = B.substitute(s, pure)
    tail = B.block_sum_powers(s, lambda i: binomial(alpha, i) if i >= 1 else Fraction(0))
    return B.block_sub(B.block_add(s_za, B.block_mul(s_za, r)), tail)


def apply_K_op(s: Block, r: Block, alpha) -> Block:
    """Derived closed form of the contraction remainder K_f.

    K_f(S) = (S o f0 - S o z^alpha)(1 + R) - ((D_1 S) o z^alpha) R, the unique
    remainder making T_f(S) = S_f(S) equivalent to the fixed-point equation.
    """
    alpha = Fraction(alpha)
    pure = B.log_images_of_power(alpha, None, s.depth, s.mode, s.cap, s.ell_stop)
    full = B.log_images_of_power(alpha, r, s.depth, s.mode, s.cap, s.ell_stop)
    delta = B.block_sub(B.substitute(s, full), B.substitute(s, pure))
    one = B.block_one(s.depth, s.mode, s.cap, s.ell_stop)
    d1s_za = B.substitute(B.D_m(s, 1), pure)
    return B.block_sub(B.block_mul(delta, B.block_add(one, r)), B.block_mul(d1s_za, r))


def apply_S_op(s: Block, r: Block, alpha) -> Block:
    """S_f(S) = -R - ((D_1 S) o z^alpha) R - K_f(S)."""
    alpha = Fraction(alpha)
    pure = B.log_images_of_power(alpha, None, s.depth, s.mode, s.cap, s.ell_stop)
    d1s_za = B.substitute(B.D_m(s, 1), pure)
    return B.block_sub(
        B.block_sub(B.block_neg(r), B.block_mul(d1s_za, r)), apply_K_op(s, r, alpha)
    )


# -- direct normalization ----------------------------------------------------------


@dataclass
class NormalizationResult:
    phi: TransSeries
    phi1: TransSeries
    phi2: TransSeries
    alpha: object
    beta: object
    iterations: int
    achieved_order: object
    psi: TransSeries | None = None
    alpha_input: object = None
    inverted_input: bool = False
    verification: dict = field(default_factory=dict)


def _beta_from(g: TransSeries, alpha, ignore_alpha_block=False):
    """Safe beta = ord_z(g - z^alpha) - alpha + 1 from trusted storage."""
    diff = sub(g, monomial(Key(alpha, (0,) * g.depth), g.grid, g.mode))
    keys = [k for k in diff.terms if not (ignore_alpha_block and k.z == alpha)]
    o = min((k.z for k in keys), default=None)
    fz = diff.frontier.z
    if ignore_alpha_block and fz == alpha:
        fz = g.grid.z_cap
    cand = fz if o is None else min(o, fz)
    return cand - alpha + 1


def normalize_direct(
    f: TransSeries, beta=None, collect_iterates=False
) -> NormalizationResult:
    """Picard-iterate P_f from id with a contraction-certified stopping index."""
    shape = _require_monic_power(f)
    alpha = shape.alpha
    grid = f.grid
    ident = identity_series(grid, f.mode)
    diff = sub(f, monomial(Key(alpha, (0,) * f.depth), grid, f.mode))
    if diff.is_zero():
        beta = grid.z_cap - alpha + 1
        return NormalizationResult(ident, ident, ident, alpha, beta, 0, grid.z_cap)
    beta = _beta_from(f, alpha) if beta is None else beta
    if not beta > 1:
        raise PrenormalizationRequiredError(
            f"ord_z(f - z^alpha) = alpha + {beta - 1}; prenormalization required"
        )
    gain = (alpha - 1) * (beta - 1)
    steps = max(0, math.ceil((grid.z_cap - beta) / gain))
    h = ident
    iterates = [h]
    for _ in range(steps):
        h = bottcher_op(f, h)
        if collect_iterates:
            iterates.append(h)
    achieved = min(beta + steps * gain, grid.z_cap, h.frontier.z)
    res = NormalizationResult(h, ident, h, alpha, beta, steps, achieved)
    if collect_iterates:
        res.verification["iterates"] = iterates
    return res


def normalize(f: TransSeries, verify=True) -> NormalizationResult:
    """Full pipeline: lambda/alpha reduction, prenormalization, fixed point."""
    shape = shape_of(f)
    if shape.classification != STRONGLY_HYPERBOLIC:
        raise ShapeError(
            "only strongly hyperbolic series are normalized here; "
            "the hyperbolic case (alpha = 1) is separate prior work"
        )
    work = f
    alpha_in = shape.alpha
    inverted = False
    if shape.alpha < 1:
        work = reduce_alpha(work)
        inverted = True
    psi = None
    if not c_eq(work.terms[min(work.terms)], c_from(1, work.mode)):
        psi, work = reduce_lambda(work)
    alpha = shape_of(work).alpha

    _, r = alpha_block(work)
    if not r.is_zero():
        phi1 = prenormalize(work)
        g = conjugate(phi1, work)
    else:
        phi1 = identity_series(work.grid, work.mode)
        g = work

    beta = _beta_from(g, alpha, ignore_alpha_block=not r.is_zero())
    direct = normalize_direct(g, beta=beta)
    phi2 = direct.phi
    phi = compose(phi2, phi1)

    res = NormalizationResult(
        phi,
        phi1,
        phi2,
        alpha,
        beta,
        direct.iterations,
        direct.achieved_order,
        psi=psi,
        alpha_input=alpha_in,
        inverted_input=inverted,
    )
    if verify:
        res.verification = verify_normalization(work, res)
    return res


def _front_json(front):
    if isinstance(front, Cut):
        return (str(front.z), "cut")
    return (str(front.z), list(front.l))


def verify_normalization(f: TransSeries, res: NormalizationResult) -> dict:
    """Check conjugate(phi, f) = z^alpha at every retained key below the frontier.

    Exact mode demands literal zero residuals; float mode (which carries no
    exactness guarantee) tolerates rounding dust below 1e-9.
    """
    alpha = res.alpha
    conj = conjugate(res.phi, f)
    target = monomial(Key(alpha, (0,) * conj.depth), conj.grid, conj.mode)
    residual = sub(conj, target)
    if f.mode == "float":
        bad = [
            k for k, c in residual.terms.items()
            if k < residual.frontier and abs(c) > 1e-9
        ]
    else:
        bad = [k for k in residual.terms if k < residual.frontier]
    report = {
        "conjugation_exact_below_frontier": not bad,
        "checked_below": _front_json(residual.frontier),
        "order_bound_ok": order_bound_check(f, res.phi),
    }
    if bad:
        report["first_bad_key"] = (str(min(bad).z), list(min(bad).l))
    return report


# -- sequences and diagnostics ------------------------------------------------------


def bottcher_iterates(f: TransSeries, h: TransSeries, n: int) -> list[TransSeries]:
    """[h, P_f h, ..., P_f^n h] (the n-th entry is z^(1/alpha^n) o h o f^on)."""
    out = [h]
    for _ in range(n):
        out.append(bottcher_op(f, out[-1]))
    return out


def bottcher_sequence(f: TransSeries, h: TransSeries, n: int) -> TransSeries:
    if n < 0:
        raise ValueError("n must be >= 0")
    return bottcher_iterates(f, h, n)[-1]


def convergence_mode(f: TransSeries, h: TransSeries) -> dict:
    """Weak convergence always holds; power-metric iff Lb_z(h) = Lb_z(phi)."""
    res = normalize(f, verify=False)
    a_h, lb_h = leading_block(h)
    a_p, lb_p = leading_block(res.phi)
    d = B.block_sub(lb_h, lb_p)
    same_block = d.is_zero() or (d.frontier is not None and min(d.terms) >= d.frontier)
    return {"weak_always": True, "power_metric": bool(a_h == a_p and same_block)}


def ell1_distance_on_parabolic(h1: TransSeries, h2: TransSeries) -> float:
    """The l1-order metric d(id+zR, id+zS) = 2^(-ord_l1(R-S)) on 1-blocks."""
    _, b1 = leading_block(h1)
    _, b2 = leading_block(h2)
    return B.dist_ell(b1, b2, 1)


# -- support control -----------------------------------------------------------------


@dataclass(frozen=True)
class SemigroupSpec:
    generators: tuple
    cutoff: Key

    def contains(self, w: Key) -> bool:
        return semigroup_contains(list(self.generators), w)


def support_predict(f: TransSeries) -> SemigroupSpec:
    """Semigroup bound for supp(phi): powers alpha^p, log units, shifted supp(f-z^alpha)."""
    shape = _require_monic_power(f)
    alpha = Fraction(shape.alpha)
    grid = f.grid
    depth = f.depth
    gens: set[Key] = set()
    p = Fraction(1)
    while p < grid.z_cap:
        gens.add(Key(p, (0,) * depth))
        p *= alpha
    for j in range(1, depth + 1):
        gens.add(ell_key(depth, j))
    target = monomial(Key(alpha, (0,) * depth), grid, f.mode)
    for k in sub(f, target).terms:
        step = k.z - alpha
        m = Fraction(1)
        while True:
            zpart = m * step
            if zpart >= grid.z_cap:
                break
            gens.add(Key(zpart, k.l))
            if step == 0:
                break
            m *= alpha
    return SemigroupSpec(tuple(sorted(gens)), grid.trunc_key())


def support_of_composition_bound(g: TransSeries, f: TransSeries) -> SemigroupSpec:
    """Generators bounding supp(f o g) per the composition-support lemma."""
    shape = shape_of(g)
    alpha = shape.alpha
    depth = max(f.depth, g.depth)
    gens: set[Key] = set()
    for j in range(1, depth + 1):
        gens.add(ell_key(depth, j))
    for k in f.terms:
        gens.add(Key(alpha * k.z, k.l).pad(depth))
    target = monomial(Key(alpha, (0,) * g.depth), g.grid, g.mode)
    for k in sub(g, target).terms:
        key = Key(k.z - alpha, k.l).pad(depth)
        if not key.is_zero():
            gens.add(key)
    cutoff = Cut(min(f.grid.z_cap, g.grid.z_cap))
    return SemigroupSpec(tuple(sorted(gens)), cutoff)


def semigroup_contains(gens: list[Key], w: Key) -> bool:
    """Exact membership of w in the generated additive semigroup.

    Generators are lex-positive, so the pure-log generators are triangular:
    grouping them by first nonzero coordinate makes the search finite.
    """
    if w.is_zero():
        return True
    depth = w.depth
    zpos = [g for g in gens if g.z > 0]
    lonly: dict[int, list[Key]] = {}
    for g in gens:
        if g.z == 0:
            m = next((j for j, n in enumerate(g.l) if n != 0), None)
            if m is None:
                continue
            lonly.setdefault(m, []).append(g)

    zpos = sorted(zpos, reverse=True)

    def ell_feasible(target: tuple, group: int) -> bool:
        if group >= depth:
            return all(t == 0 for t in target)
        rem = target[group]
        if all(t == 0 for t in target[group:]):
            return True
        group_gens = lonly.get(group, [])
        if not group_gens:
            if rem != 0:
                return False
            return ell_feasible(target, group + 1)

        def rec(i: int, rem_m: int, tgt: tuple) -> bool:
            if i == len(group_gens):
                if rem_m != 0:
                    return False
                cleared = tuple(0 if j == group else t for j, t in enumerate(tgt))
                return ell_feasible(cleared, group + 1)
            g = group_gens[i]
            step = g.l[group]
            k = 0
            while k * step <= rem_m:
                new_tgt = tuple(
                    t - k * g.l[j] if j > group else t for j, t in enumerate(tgt)
                )
                if rec(i + 1, rem_m - k * step, new_tgt):
                    return True
                k += 1
            return False

        return rec(0, rem, target)

    def search(i: int, z_rem, l_rem: tuple) -> bool:
        if i == len(zpos):
            if z_rem != 0:
                return False
            return ell_feasible(l_rem, 0)
        g = zpos[i]
        k = 0
        while k * g.z <= z_rem:
            nl = tuple(a - k * b for a, b in zip(l_rem, g.l))
            if search(i + 1, z_rem - k * g.z, nl):
                return True
            k += 1
        return False

    return search(0, w.z, w.l)


def enumerate_semigroup(spec: SemigroupSpec, ell_window: int = 8) -> list[Key]:
    """All semigroup sums below the cutoff with log exponents in [-w, w]."""
    import heapq

    depth = spec.cutoff.depth
    seen: set[Key] = set()
    heap = [g for g in spec.generators if g < spec.cutoff]
    heapq.heapify(heap)
    out = []
    while heap:
        k = heapq.heappop(heap)
        if k in seen:
            continue
        seen.add(k)
        out.append(k)
        for g in spec.generators:
            nk = k + g
            if nk < spec.cutoff and nk not in seen and all(
                abs(n) <= ell_window for n in nk.l
            ):
                heapq.heappush(heap, nk)
    return out


# -- scalar bounds -----------------------------------------------------------------


def order_bound_check(f: TransSeries, phi: TransSeries) -> bool:
    """ord_z(phi - id) >= ord_z(f - z^alpha) - alpha + 1."""
    shape = shape_of(f)
    alpha = shape.alpha
    target = monomial(Key(alpha, (0,) * f.depth), f.grid, f.mode)
    beta = _beta_from(f, alpha)
    diff = sub(phi, identity_series(phi.grid, phi.mode))
    o = ord_z(diff)
    if o is None:
        return True
    return o >= beta


def binomial_bound_check(alpha, n: int, i: int) -> bool:
    """|binom(1/alpha^n, i)| <= 1/alpha^n, exactly."""
    alpha = Fraction(alpha)
    x = Fraction(1) / alpha**n
    return abs(binomial(x, i)) <= x
