"""Formal composition, inversion and conjugation for logarithmic transseries.

Composition g o f is defined for right factors f whose leading term is a
log-free power lambda*z^alpha.  It is computed term-by-term: each monomial
c z^d l1^n1 ... of g maps to c * (z^d o f) * prod (l_j o f)^nj, where z^d o f
is a binomial series in u = (f - lambda z^alpha)/(lambda z^alpha) and the
iterated-log images come from the recursion l_(m+1) o f = l1 o (l_m o f).
The series stop certifiably past the truncation frontier (ord u > 0).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .coeffs import (
    EXACT,
    Exact,
    c_eq,
    c_from,
    c_inv,
    c_is_zero,
    c_mul,
    c_one,
    c_pow_rational,
)
from .errors import DepthOverflowError, ModeError, ShapeError
from .keys import Key, ell_key, front_zscale, zero_key
from .series import (
    TransSeries,
    add,
    d_dz,
    identity_series,
    leading_term,
    make_series,
    monomial,
    mul,
    mul_monomial,
    pow_rational,
    scale,
    series_inverse,
    split_leading,
    sub,
    sum_powers,
    zero_series,
)

PARABOLIC = "parabolic"
HYPERBOLIC = "hyperbolic"
STRONGLY_HYPERBOLIC = "strongly_hyperbolic"


@dataclass(frozen=True)
class HyperbolicShape:
    """Leading data (lambda, alpha) of a series with a log-free leading term."""

    lam: object
    alpha: object
    classification: str


def shape_of(f: TransSeries) -> HyperbolicShape:
    """Classify f or raise ShapeError when f is outside the composable class."""
    if f.is_zero():
        raise ShapeError("zero series has no hyperbolic shape")
    key, lam = leading_term(f)
    if any(n != 0 for n in key.l):
        raise ShapeError("leading term contains logarithms")
    alpha = key.z
    if alpha <= 0:
        raise ShapeError(f"leading exponent {alpha} is not positive")
    if alpha == 1:
        one = c_one(f.mode) if f.mode != EXACT else Exact.of(1)
        cls = PARABOLIC if c_eq(lam, c_from(1, f.mode)) else HYPERBOLIC
    else:
        cls = STRONGLY_HYPERBOLIC
    return HyperbolicShape(lam, alpha, cls)


def is_parabolic(f: TransSeries) -> bool:
    try:
        return shape_of(f).classification == PARABOLIC
    except ShapeError:
        return False


def _log_coeff(lam, mode):
    """log(lambda) as a coefficient; exact mode needs a positive rational lambda."""
    if mode == EXACT:
        re, im = lam.rational_parts()
        if im != 0 or re <= 0:
            raise ModeError(
                f"log({re}+{im}i) is not an exact coefficient; use float mode"
            )
        val = Exact.log_of_rational(re)
        return None if val.is_zero() else val
    z = lam if isinstance(lam, complex) else complex(lam)
    val = cmath.log(z)
    return None if val == 0 else val


# -- elementary right-compositions -------------------------------------------


def compose_power(beta, f: TransSeries) -> TransSeries:
    """z^beta o f for rational (or float-mode) beta."""
    shape_of(f)
    return pow_rational(f, beta)


def compose_log(f: TransSeries) -> TransSeries:
    """log z o f = log lambda + alpha log z + log(1 + u), with log z = -l1^(-1)."""
    shape = shape_of(f)
    if f.grid.depth < 1:
        raise DepthOverflowError("compose_log needs depth >= 1 for l1")
    _, lam, u = split_leading(f)
    out = scale(monomial(ell_key(f.grid.depth, 1, -1), f.grid, f.mode), -Fraction(1))
    out = scale(out, shape.alpha) if not isinstance(shape.alpha, float) else scale_f(out, shape.alpha)
    logc = _log_coeff(lam, f.mode)
    if logc is not None:
        out = add(out, monomial(zero_key(f.grid.depth), f.grid, f.mode, logc))
    from .series import log1p

    return add(out, log1p(u))


def scale_f(a: TransSeries, x: float) -> TransSeries:
    return make_series(
        {k: c_mul(c, complex(x)) for k, c in a.terms.items()}, a.grid, a.mode, [a.frontier]
    )


def _geom_after_prefactor(prefactor: TransSeries, v: TransSeries) -> TransSeries:
    """prefactor * Sigma_i v^i."""
    return sum_powers(v, lambda i: Fraction(1), v.grid, v.mode, prefactor=prefactor)


def compose_ell(m: int, f: TransSeries) -> TransSeries:
    """l_m o f via l_1 o f = -1/compose_log(f) and l_(m+1) o f = l_1 o (l_m o f)."""
    if m < 1:
        raise ValueError("log index must be >= 1")
    if m > f.grid.depth:
        raise DepthOverflowError(f"l_{m} needs depth {m}, grid has {f.grid.depth}")
    return _ell_images(f, m)[m - 1]


def _ell_images(f: TransSeries, upto: int) -> list[TransSeries]:
    """Images l_1 o f .. l_upto o f.

    Level 1:  -1/(log lambda + alpha log z + log1p u)
            = (l1/alpha) Sigma_i ((log lambda + log1p u) l1/alpha)^i.
    Level m+1 from E_m = c_m l_m (1 + w):
              l_(m+1) Sigma_i ((log c_m + log1p w) l_(m+1))^i,
    where c_1 = 1/alpha and c_m = 1 for m >= 2.
    """
    shape = shape_of(f)
    grid, mode = f.grid, f.mode
    if upto > grid.depth:
        raise DepthOverflowError(f"l_{upto} needs depth {upto}")
    _, lam, u = split_leading(f)
    alpha = shape.alpha
    inv_alpha = Fraction(1) / alpha if not isinstance(alpha, float) else 1.0 / alpha

    from .series import log1p

    big_l = log1p(u)
    logc = _log_coeff(lam, mode)
    if logc is not None:
        big_l = add(big_l, monomial(zero_key(grid.depth), grid, mode, logc))

    l1 = monomial(ell_key(grid.depth, 1), grid, mode)
    pref = scale(l1, inv_alpha) if not isinstance(alpha, float) else scale_f(l1, inv_alpha)
    v1 = mul(big_l, pref)
    images = [_geom_after_prefactor(pref, v1)]

    for m in range(2, upto + 1):
        prev = images[-1]
        key, c, w = split_leading(prev)
        if m == 2:
            if mode == EXACT:
                log_cm = Exact.log_of_rational(Fraction(1) / Fraction(alpha))
            else:
                log_cm = complex(-math.log(float(alpha)))
        else:
            log_cm = None
        inner = log1p(w)
        if log_cm is not None and not c_is_zero(log_cm):
            inner = add(inner, monomial(zero_key(grid.depth), grid, mode, log_cm))
        lm = monomial(ell_key(grid.depth, m), grid, mode)
        images.append(_geom_after_prefactor(lm, mul(inner, lm)))
    return images


# -- general composition -------------------------------------------------------


class _ComposeCtx:
    """Per-right-factor cache: split data, l-images, u-powers, binomial bodies."""

    def __init__(self, f: TransSeries):
        self.f = f
        shape = shape_of(f)
        self.alpha = shape.alpha
        _, self.lam, self.u = split_leading(f)
        self.images: list[TransSeries] = []
        self.u_pows: list[TransSeries] = [
            monomial(zero_key(f.grid.depth), f.grid, f.mode)
        ]
        self.bodies: dict[object, TransSeries] = {}
        self.img_pows: dict[tuple[int, int], TransSeries] = {}
        self.prod_cache: dict[tuple, TransSeries] = {}
        n0 = _ord_for_sum(self.u, f.grid)
        self.u_ord = n0

    def u_power(self, i: int) -> TransSeries:
        while len(self.u_pows) <= i:
            self.u_pows.append(mul(self.u_pows[-1], self.u))
        return self.u_pows[i]

    def stop_index(self, base_z) -> int:
        grid = self.f.grid
        n0 = self.u_ord
        i = 0
        while True:
            if n0.z > 0:
                if base_z + i * n0.z >= grid.z_cap:
                    return i
            elif i > grid.ell_stop:
                return i
            i += 1

    def body(self, delta) -> TransSeries:
        """Sigma_i binom(delta, i) u^i with the certified stop and tail penalty."""
        hit = self.bodies.get(delta)
        if hit is not None:
            return hit
        grid, mode = self.f.grid, self.f.mode
        i_stop = self.stop_index(self.alpha * delta)
        acc = zero_series(grid, mode)
        for i in range(i_stop):
            q = _binom_any(delta, i)
            if q != 0:
                acc = add(acc, scale(self.u_power(i), q))
        penalty = self.u_ord.scale(i_stop)
        out = make_series(acc.terms, grid, mode, [acc.frontier, penalty])
        self.bodies[delta] = out
        return out

    def ell_image(self, j: int) -> TransSeries:
        if len(self.images) < j:
            self.images = _ell_images(self.f, j)
        return self.images[j - 1]

    def image_power(self, j: int, n: int) -> TransSeries:
        """E_j^n built incrementally (one mul per new power, inverse cached)."""
        key = (j, n)
        hit = self.img_pows.get(key)
        if hit is not None:
            return hit
        if n == 0:
            out = monomial(zero_key(self.f.grid.depth), self.f.grid, self.f.mode)
        elif n > 0:
            out = mul(self.image_power(j, n - 1), self.ell_image(j))
        else:
            inv_key = (j, -1)
            if inv_key not in self.img_pows and n < -1:
                self.img_pows[inv_key] = series_inverse(self.ell_image(j))
            if n == -1:
                out = series_inverse(self.ell_image(j))
            else:
                out = mul(self.image_power(j, n + 1), self.img_pows[(j, -1)])
        self.img_pows[key] = out
        return out

    def image_product(self, lvec: tuple) -> TransSeries | None:
        """prod_j (l_j o f)^(n_j) for a log multi-index, None for the empty one."""
        if not any(lvec):
            return None
        hit = self.prod_cache.get(lvec)
        if hit is not None:
            return hit
        out = None
        for j, n in enumerate(lvec, start=1):
            if n:
                p = self.image_power(j, n)
                out = p if out is None else mul(out, p)
        self.prod_cache[lvec] = out
        return out


def _ord_for_sum(u: TransSeries, grid) -> Key:
    from .series import ord_for_frontier

    return ord_for_frontier(u)


_CTX_CACHE: dict[int, tuple] = {}


def _ctx_for(f: TransSeries) -> _ComposeCtx:
    entry = _CTX_CACHE.get(id(f))
    if entry is not None and entry[0] is f:
        return entry[1]
    ctx = _ComposeCtx(f)
    if len(_CTX_CACHE) >= 48:
        _CTX_CACHE.clear()
    _CTX_CACHE[id(f)] = (f, ctx)
    return ctx


def compose(g: TransSeries, f: TransSeries) -> TransSeries:
    """g o f; the right factor must have a log-free leading term.

    Computed term-group-wise: for each distinct log multi-index of g the
    z-profile is assembled from cached binomial bodies, then multiplied once
    by the cached product of iterated-log images.
    """
    from .series import _common

    g, f = _common(g, f)
    grid, mode = g.grid, g.mode
    ctx = _ctx_for(f)
    alpha, lam = ctx.alpha, ctx.lam
    if g.is_zero():
        return make_series({}, grid, mode, [front_zscale(g.frontier, alpha)])

    groups: dict[tuple, TransSeries] = {}
    for key, c in g.terms.items():
        delta = key.z
        lam_pow = c_pow_rational(lam, delta) if delta != 0 else c_one(mode)
        piece = mul_monomial(
            ctx.body(delta), Key(alpha * delta, (0,) * grid.depth), c_mul(c, lam_pow)
        )
        if key.l in groups:
            groups[key.l] = add(groups[key.l], piece)
        else:
            groups[key.l] = piece

    acc = zero_series(grid, mode)
    for lvec, piece in groups.items():
        prod = ctx.image_product(lvec)
        acc = add(acc, piece if prod is None else mul(piece, prod))

    tail_penalty = front_zscale(g.frontier, alpha)
    return make_series(acc.terms, grid, mode, [acc.frontier, tail_penalty])


def _binom_any(delta, i):
    from .coeffs import binomial

    return binomial(delta if isinstance(delta, float) else Fraction(delta), i)


# -- inversion and conjugation --------------------------------------------------


def invert(f: TransSeries) -> TransSeries:
    """Compositional inverse by Newton refinement from the leading-monomial seed."""
    g = _invert_seed(f)
    ident = identity_series(f.grid, f.mode)
    fprime = d_dz(f)
    last_ord = None
    for _ in range(64):
        r = sub(compose(f, g), ident)
        if r.is_zero() or min(r.terms) >= r.frontier:
            break
        o = min(r.terms)
        if last_ord is not None and not o > last_ord:
            break
        last_ord = o
        g = sub(g, mul(r, series_inverse(compose(fprime, g))))
    return g


def _invert_seed(f: TransSeries) -> TransSeries:
    shape = shape_of(f)
    alpha, lam = shape.alpha, f.terms[min(f.terms)]
    inv_alpha = Fraction(1) / alpha if not isinstance(alpha, float) else 1.0 / alpha
    lam_pow = c_pow_rational(c_inv(lam), inv_alpha)
    return monomial(Key(inv_alpha, (0,) * f.grid.depth), f.grid, f.mode, lam_pow)


def invert_graded(f: TransSeries) -> TransSeries:
    """Cross-check inversion: kill residual terms one leading term at a time."""
    g = _invert_seed(f)
    ident = identity_series(f.grid, f.mode)
    fprime = d_dz(f)
    for _ in range(600):
        r = sub(compose(f, g), ident)
        if r.is_zero() or min(r.terms) >= r.frontier:
            return g
        den = compose(fprime, g)
        wk, wc = leading_term(r)
        dk, dc = leading_term(den)
        g = add(g, monomial(wk - dk, g.grid, g.mode, c_mul(c_from(-1, g.mode), c_mul(wc, c_inv(dc)))))
    raise ShapeError("graded inversion did not converge within the frontier")


def conjugate(phi: TransSeries, f: TransSeries) -> TransSeries:
    """phi o f o phi^(-1); phi must be parabolic."""
    if not is_parabolic(phi):
        raise ShapeError("conjugating change of variables must be parabolic")
    shape_of(f)
    return compose(compose(phi, f), invert(phi))


def reduce_lambda(f: TransSeries):
    """psi = lambda^(1/(alpha-1)) z; returns (psi, psi o f o psi^(-1)) with lead z^alpha."""
    shape = shape_of(f)
    if shape.classification != STRONGLY_HYPERBOLIC:
        raise ShapeError("lambda-reduction applies to strongly hyperbolic series")
    alpha, lam = shape.alpha, f.terms[min(f.terms)]
    grid, mode = f.grid, f.mode
    if c_eq(lam, c_from(1, mode)):
        return identity_series(grid, mode), f
    expo = Fraction(1) / (Fraction(alpha) - 1) if not isinstance(alpha, float) else 1.0 / (alpha - 1.0)
    c = c_pow_rational(lam, expo)
    psi = monomial(Key(1, (0,) * grid.depth), grid, mode, c)
    log_free = all(all(n == 0 for n in k.l) for k in f.terms)
    if log_free:
        cinv = c_inv(c)
        terms = {}
        for k, v in f.terms.items():
            w = c_mul(c, c_mul(v, c_pow_rational(cinv, k.z)))
            terms[k] = w
        reduced = make_series(terms, grid, mode, [f.frontier])
    else:
        reduced = compose(compose(psi, f), invert(psi))
    return psi, reduced


def reduce_alpha(f: TransSeries) -> TransSeries:
    """For 0 < alpha < 1 return f^(-1), whose leading exponent is 1/alpha > 1."""
    shape = shape_of(f)
    if not shape.classification == STRONGLY_HYPERBOLIC or not shape.alpha < 1:
        raise ShapeError("alpha-reduction applies to strongly hyperbolic alpha < 1")
    return invert(f)
