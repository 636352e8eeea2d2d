"""Dulac series in both charts, chart conversion, and formal/numeric comparison.

z-chart: lambda z^alpha + sum_i z^(alpha_i) P_i(-log z), alpha_i strictly
increasing above alpha.  zeta-chart (zeta = -log z): alpha zeta - log lambda
+ sum_i e^(-beta_i zeta) Q_i(zeta) with beta_i = alpha_i - alpha.  Ladders are
finite by construction; the e^(-1)-order cap plays the role of z_cap - alpha.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .coeffs import (
    EXACT,
    Exact,
    c_add,
    c_from,
    c_is_zero,
    c_mul,
    c_neg,
    c_scale,
    c_to_complex,
    c_zero,
)
from .errors import BottcherError, DomainError, ModeError, ShapeError
from .keys import Key
from .series import TransSeries, TruncationGrid, make_series
from .normalize import normalize


@dataclass
class DulacSeriesZ:
    """lambda z^alpha + sum z^(alpha_i) P_i(-log z); P_i dense by degree."""

    lam: object
    alpha: Fraction
    ladder: list
    mode: str = EXACT

    def __post_init__(self):
        self.alpha = _as_exp(self.alpha)
        self.lam = c_from(self.lam, self.mode)
        self.ladder = sorted(
            ((_as_exp(a), [c_from(c, self.mode) for c in p]) for a, p in self.ladder),
            key=lambda t: t[0],
        )
        last = self.alpha
        for a, _ in self.ladder:
            if a <= last:
                raise ShapeError("ladder exponents must strictly increase above alpha")
            last = a


@dataclass
class DulacSeriesZeta:
    """alpha zeta + c0 + sum e^(-beta_i zeta) Q_i(zeta); c0 = -log lambda."""

    alpha: object
    c0: object
    ladder: list
    mode: str = EXACT

    def __post_init__(self):
        self.c0 = c_from(self.c0, self.mode)
        self.ladder = sorted(
            ((_as_exp(b), [c_from(c, self.mode) for c in q]) for b, q in self.ladder),
            key=lambda t: t[0],
        )
        for b, _ in self.ladder:
            if b <= 0:
                raise ShapeError("zeta-chart ladder exponents must be positive")


def _as_exp(x):
    return x if isinstance(x, float) else Fraction(x)


def ord_e_inv(d: DulacSeriesZeta):
    """Order in e^(-1): minimal beta_i with Q_i != 0 (None for trivial ladder)."""
    for b, q in d.ladder:
        if any(not c_is_zero(c) for c in q):
            return b
    return None


# -- ladder arithmetic (exponent-graded polynomial series) -----------------------


def _poly_add(p, q, mode):
    n = max(len(p), len(q))
    out = []
    for i in range(n):
        a = p[i] if i < len(p) else c_zero(mode)
        b = q[i] if i < len(q) else c_zero(mode)
        out.append(c_add(a, b))
    return out


def _poly_mul(p, q, mode):
    out = [c_zero(mode)] * (len(p) + len(q) - 1) if p and q else []
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = c_add(out[i + j], c_mul(a, b))
    return out


def _ladd(A, B, mode):
    out = dict(A)
    for b, q in B.items():
        out[b] = _poly_add(out.get(b, []), q, mode)
    return out


def _lmul(A, B, mode, e_cap):
    out = {}
    for ba, pa in A.items():
        for bb, pb in B.items():
            b = ba + bb
            if b >= e_cap:
                continue
            prod = _poly_mul(pa, pb, mode)
            out[b] = _poly_add(out.get(b, []), prod, mode)
    return out


def _lscale(A, q, mode):
    return {b: [c_scale(c, q) for c in p] for b, p in A.items()}


def _lprune(A, mode):
    out = {}
    for b, p in A.items():
        while p and c_is_zero(p[-1]):
            p = p[:-1]
        if p:
            out[b] = p
    return out


def _lsum_powers(u, coeff_of, mode, e_cap):
    """Sigma_j coeff_of(j) u^j; min beta of u > 0 so j is bounded by e_cap."""
    if u:
        bmin = min(u)
        if bmin <= 0:
            raise ShapeError("ladder power sum needs positive minimal exponent")
        jmax = int(e_cap / bmin) + 1
    else:
        jmax = 0
    acc: dict = {}
    upow = {Fraction(0) if mode == EXACT else 0.0: [c_from(1, mode)]}
    for j in range(jmax + 1):
        q = coeff_of(j)
        if q != 0:
            acc = _ladd(acc, _lscale(upow, q, mode), mode)
        upow = _lmul(upow, u, mode, e_cap)
    return _lprune(acc, mode)


def _log1p_ladder(u, mode, e_cap):
    return _lsum_powers(
        u, lambda j: Fraction((-1) ** (j + 1), j) if j else Fraction(0), mode, e_cap
    )


def _expm1_ladder(v, mode, e_cap):
    fact = [Fraction(1)]

    def coeff(j):
        while len(fact) <= j:
            fact.append(fact[-1] / len(fact))
        return fact[j] if j else Fraction(0)

    return _lsum_powers(v, coeff, mode, e_cap)


# -- chart conversions ------------------------------------------------------------


def to_zeta_chart(d: DulacSeriesZ, e_cap=None, c0=None) -> DulacSeriesZeta:
    """f(zeta) = -log f(e^(-zeta)) = alpha zeta - log lambda - log(1 + u)."""
    mode = d.mode
    if c_is_zero(d.lam):
        raise ShapeError("lambda must be nonzero")
    if e_cap is None:
        e_cap = (d.ladder[-1][0] - d.alpha) + 1 if d.ladder else Fraction(1)
    if c0 is None:
        if mode == EXACT:
            re, im = d.lam.rational_parts()
            if im != 0 or re <= 0:
                raise ModeError("-log(lambda) not exact here; pass c0 or use float mode")
            c0 = -Exact.log_of_rational(re)
        else:
            c0 = -cmath.log(complex(d.lam))
    from .coeffs import c_inv

    lam_inv = c_inv(d.lam)
    u = {}
    for a_i, p in d.ladder:
        beta = a_i - d.alpha
        if beta >= e_cap:
            continue
        u[beta] = [c_mul(c, lam_inv) for c in p]
    body = _log1p_ladder(u, mode, e_cap)
    ladder = [(b, [c_neg(c) for c in p]) for b, p in sorted(body.items())]
    return DulacSeriesZeta(d.alpha, c0, ladder, mode)


def to_z_chart(d: DulacSeriesZeta, e_cap=None) -> DulacSeriesZ:
    """f(z) = e^(-c0) z^alpha exp(-v), v the zeta-chart ladder."""
    mode = d.mode
    if e_cap is None:
        e_cap = (d.ladder[-1][0] + 1) if d.ladder else Fraction(1)
    if mode == EXACT:
        from .coeffs import exp_of_log_exact

        lam = exp_of_log_exact(-d.c0)
    else:
        lam = cmath.exp(-complex(c_to_complex(d.c0)))
    v = {b: list(q) for b, q in d.ladder if b < e_cap}
    body = _expm1_ladder(_lscale(v, -1, mode), mode, e_cap)
    ladder = []
    for b, p in sorted(body.items()):
        ladder.append((d.alpha + b, [c_mul(c, lam) for c in p]))
    return DulacSeriesZ(lam, d.alpha, ladder, mode)


# -- transseries embedding ----------------------------------------------------------


def is_dulac(f: TransSeries, below_frontier: bool = True) -> bool:
    """Depth <= 1, all l1-exponents <= 0, log-free leading term."""
    keys = [k for k in f.terms if (not below_frontier) or k < f.frontier]
    if not keys:
        return True
    lead = min(keys)
    if any(n != 0 for n in lead.l):
        return False
    for k in keys:
        if any(n != 0 for n in k.l[1:]):
            return False
        if k.l and k.l[0] > 0:
            return False
    return True


def to_transseries(d: DulacSeriesZ, grid: TruncationGrid) -> TransSeries:
    if grid.depth < 1:
        grid = grid.with_depth(1)
    terms = {Key(d.alpha, (0,) * grid.depth): d.lam}
    for a_i, p in d.ladder:
        for deg, c in enumerate(p):
            if not c_is_zero(c):
                key = Key(a_i, (-deg,) + (0,) * (grid.depth - 1))
                terms[key] = c_add(terms.get(key, c_zero(d.mode)), c)
    return make_series(terms, grid, d.mode)


def from_transseries(f: TransSeries) -> DulacSeriesZ:
    """Certified part of f as a Dulac series (keys at/above the frontier dropped)."""
    if not is_dulac(f):
        raise ShapeError("series is not a Dulac series (depth/log-sign violation)")
    keys = [k for k in f.terms if k < f.frontier]
    if not keys:
        raise ShapeError("no certified terms to convert")
    lead = min(keys)
    lam = f.terms[lead]
    alpha = lead.z
    blocks: dict = {}
    for k in keys:
        if k == lead:
            continue
        deg = -k.l[0] if k.l else 0
        blocks.setdefault(k.z, {})[deg] = f.terms[k]
    ladder = []
    for a_i in sorted(blocks):
        poly_map = blocks[a_i]
        p = [poly_map.get(dg, c_zero(f.mode)) for dg in range(max(poly_map) + 1)]
        ladder.append((a_i, p))
    return DulacSeriesZ(lam, alpha, ladder, f.mode)


def dulac_normalize_full(d: DulacSeriesZ, z_cap=10, block_cap=12):
    """Normalize a strongly hyperbolic Dulac series; returns (phi_hat, result)."""
    grid = TruncationGrid(z_cap=z_cap, block_cap=block_cap, depth=1)
    f = to_transseries(d, grid)
    res = normalize(f)
    phi = res.phi
    if not is_dulac(phi):
        raise BottcherError(
            "internal: normalization of a Dulac series left the Dulac class"
        )
    if _is_real_dulac(d) and not _series_real_below_frontier(phi):
        raise BottcherError("internal: real Dulac input produced non-real output")
    return from_transseries(phi), res


def dulac_normalize_formal(d: DulacSeriesZ, z_cap=10, block_cap=12) -> DulacSeriesZ:
    return dulac_normalize_full(d, z_cap, block_cap)[0]


def _is_real_dulac(d: DulacSeriesZ) -> bool:
    def real(c):
        return c.is_real() if isinstance(c, Exact) else complex(c).imag == 0

    return real(d.lam) and all(real(c) for _, p in d.ladder for c in p)


def _series_real_below_frontier(f: TransSeries) -> bool:
    for k, c in f.terms.items():
        if k >= f.frontier:
            continue
        if isinstance(c, Exact):
            if not c.is_real():
                return False
        elif abs(complex(c).imag) > 1e-12:
            return False
    return True


# -- partial normalizations and asymptotic comparison -------------------------------


def partial_normalizations(phi_hat: DulacSeriesZeta, n: int) -> DulacSeriesZeta:
    """phi_hat_n = zeta + first n ladder rungs (n = 0 gives the identity)."""
    if n < 0 or n > len(phi_hat.ladder):
        raise DomainError(f"partial index {n} outside 0..{len(phi_hat.ladder)}")
    return DulacSeriesZeta(
        phi_hat.alpha, phi_hat.c0, list(phi_hat.ladder[:n]), phi_hat.mode
    )


def _is_mp(x) -> bool:
    return type(x).__module__.startswith("mpmath")


def _exp_any(x):
    if _is_mp(x):
        import mpmath

        return mpmath.exp(x)
    return cmath.exp(complex(x))


def _log_any(x):
    if _is_mp(x):
        import mpmath

        return mpmath.log(x)
    return cmath.log(complex(x))


def _num(c, like) -> object:
    """Coefficient as a number matching the precision of `like`.

    Exact rationals convert losslessly to mpmath values when `like` is an
    mpmath number; plain complex otherwise.
    """
    if not _is_mp(like):
        return c_to_complex(c)
    import mpmath

    if isinstance(c, Exact):
        out = mpmath.mpc(0)
        for k, (re, im) in c.parts.items():
            val = mpmath.mpc(
                mpmath.mpf(re.numerator) / re.denominator,
                mpmath.mpf(im.numerator) / im.denominator,
            )
            for p, e in k:
                val *= mpmath.log(p) ** e
            out += val
        return out
    return mpmath.mpc(c)


def _exp_frac_any(b, like):
    if _is_mp(like):
        import mpmath

        if isinstance(b, Fraction):
            return mpmath.mpf(b.numerator) / b.denominator
        return mpmath.mpf(b)
    return float(b)


def evaluate_zeta(d: DulacSeriesZeta, zeta, log_value=None):
    """Numeric value alpha zeta + c0 + sum e^(-beta zeta) Q(zeta)."""
    out = _exp_frac_any(d.alpha, zeta) * zeta + _num(d.c0, zeta)
    for b, q in d.ladder:
        horner = 0 * zeta
        for c in reversed(q):
            horner = horner * zeta + _num(c, zeta)
        out = out + _exp_any(-_exp_frac_any(b, zeta) * zeta) * horner
    return out


def evaluate_series_zeta(f: TransSeries, zeta, log_value=None):
    """Evaluate a transseries at z = e^(-zeta): l1 = 1/zeta, l_{m+1} = -1/log(l_m)."""
    vals = []
    if f.depth >= 1:
        vals.append(1 / zeta)
        for _ in range(1, f.depth):
            vals.append(-1 / _log_any(vals[-1]))
    out = 0 * zeta
    for k, c in f.terms.items():
        term = _num(c, zeta) * _exp_any(-_exp_frac_any(k.z, zeta) * zeta)
        for j, n in enumerate(k.l):
            if n:
                term = term * vals[j] ** n
        out = out + term
    return out


def _decay_report(xs, vals, noise_floor=0.0):
    """Trend of a statistic along increasing Re: bounded + trending down.

    "Decays" means: last-decade mean below 0.5x first-decade mean, and the
    least-squares slope of log(statistic) is negative (documented thresholds).
    """
    pts = [(x, v) for x, v in zip(xs, vals) if v > noise_floor]
    if len(pts) < 4:
        return {"pass": False, "reason": "too few points above noise floor", "points": pts}
    k = max(1, len(pts) // 4)
    first = sum(v for _, v in pts[:k]) / k
    last = sum(v for _, v in pts[-k:]) / k
    lx = [x for x, _ in pts]
    ly = [math.log(v) for _, v in pts]
    n = len(pts)
    mx = sum(lx) / n
    my = sum(ly) / n
    denom = sum((x - mx) ** 2 for x in lx)
    slope = sum((x - mx) * (y - my) for x, y in zip(lx, ly)) / denom if denom else 0.0
    ok = last <= 0.5 * first and slope < 0.0
    return {
        "pass": bool(ok),
        "slope": slope,
        "fitted_rate": -slope,
        "first_decade": first,
        "last_decade": last,
        "n_points": n,
    }


def defect_decay_check(f, phi_n: DulacSeriesZeta, beta_n, alpha, xs, im=0.0, noise_floor=0.0):
    """sup-grid of |phi_n(f(zeta)) - alpha phi_n(zeta)| e^(beta_n Re) and its trend."""
    beta = float(beta_n)
    stats = []
    for x in xs:
        zeta = complex(x, im)
        d = abs(evaluate_zeta(phi_n, f(zeta)) - alpha * evaluate_zeta(phi_n, zeta))
        stats.append(float(d) * math.exp(beta * x))
    rep = _decay_report(xs, stats, noise_floor)
    rep["sup"] = max(stats) if stats else 0.0
    rep["statistic"] = stats
    return rep


def compare_formal_numeric(
    phi_numeric, phi_hat: DulacSeriesZeta, n: int, xs, im=0.0, noise_floor=0.0
):
    """sup of |phi(zeta) - phi_hat_n(zeta)| e^(beta_n Re) along a ray, with trend."""
    phin = partial_normalizations(phi_hat, n)
    beta = float(phi_hat.ladder[n - 1][0]) if n >= 1 else 0.0
    evaluator = phi_numeric.evaluator if hasattr(phi_numeric, "evaluator") else phi_numeric
    stats = []
    for x in xs:
        zeta = _complex_like(x, im, xs)
        diff = abs(evaluator(zeta) - evaluate_zeta(phin, zeta))
        stats.append(float(diff) * math.exp(beta * float(x)))
    rep = _decay_report([float(x) for x in xs], stats, noise_floor)
    rep["sup"] = max(stats) if stats else 0.0
    rep["statistic"] = stats
    rep["beta_n"] = beta
    return rep


def _complex_like(x, im, xs):
    if type(x).__module__.startswith("mpmath"):
        import mpmath

        return mpmath.mpc(x, im)
    return complex(float(x), im)
