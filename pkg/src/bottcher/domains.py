"""Admissible-domain geometry and grid certification for the analytic pipeline.

Conventions: M_{eps,k}(x) = (log^ok x)^(-eps) with log^o0 = identity, and
rho_{alpha,eps,k}(x) = (alpha-1) x - M_{eps,k}(x).  All certification here is
numeric checking on grids plus the sufficient analytic criteria; reports say
"certified at sampled resolution", never "proved".
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import CertificationError, DomainError


def iter_log(x: float, k: int) -> float:
    for _ in range(k):
        if x <= 0:
            raise DomainError(f"log^o{k} undefined at {x}")
        x = math.log(x)
    return x


def iter_exp(x: float, k: int) -> float:
    for _ in range(k):
        x = math.exp(x)
    return x


def M_eps_k(x: float, eps: float, k: int) -> float:
    """(log^ok x)^(-eps); requires x > exp^ok(0)."""
    if x <= iter_exp(0.0, k):
        raise DomainError(f"M_eps_k needs x > exp^o{k}(0) = {iter_exp(0.0, k)}")
    return iter_log(x, k) ** (-eps)


def rho(x: float, alpha: float, eps: float, k: int) -> float:
    """(alpha-1) x - M_{eps,k}(x): the guaranteed real-part gain of one step."""
    return (alpha - 1.0) * x - M_eps_k(x, eps, k)


@dataclass(frozen=True)
class AsymptoticSpec:
    """Type (alpha, eps, k) of the defect bound |f(z) - alpha z| <= M_{eps,k}(Re z)."""

    alpha: float
    eps: float
    k: int
    bound_threshold: float | None = None

    def M(self, x: float) -> float:
        return M_eps_k(x, self.eps, self.k)

    def rho(self, x: float) -> float:
        return rho(x, self.alpha, self.eps, self.k)


@dataclass
class DomainSpec:
    """Standard quadratic domain (kind='standard_quadratic', parameter C) or an
    explicit lower/upper boundary pair on [t, inf)."""

    kind: str
    C: float | None = None
    h_l: object = None
    h_u: object = None
    t: float | None = None
    restriction: float | None = None

    @staticmethod
    def standard_quadratic(C: float) -> "DomainSpec":
        if C <= 0:
            raise DomainError("standard quadratic domain needs C > 0")
        return DomainSpec(kind="standard_quadratic", C=C)

    @staticmethod
    def lower_upper(h_l, h_u, t: float) -> "DomainSpec":
        return DomainSpec(kind="lower_upper", h_l=h_l, h_u=h_u, t=t)


# -- standard quadratic domains -------------------------------------------------


def sqd_kappa(w: complex, C: float) -> complex:
    return w + C * cmath.sqrt(w + 1)


def sqd_boundary(r: float, C: float) -> complex:
    """Boundary point x(r) + i y(r) of the upper half boundary, r >= 0."""
    if r < 0 or C <= 0:
        raise DomainError("need r >= 0 and C > 0")
    s1 = math.sin(0.5 * math.atan(r))
    s2 = math.cos(0.5 * math.atan(r))
    quarter = (r * r + 1.0) ** 0.25
    return complex(C * quarter * s2, r + C * quarter * s1)


def sqd_membership(zeta: complex, C: float, tol: float = 1e-9):
    """Is zeta in kappa(C+), kappa(w) = w + C sqrt(w+1)?  True/False/None.

    The quadratic (zeta - w)^2 = C^2 (w + 1) gives both inversion candidates;
    each verified against kappa with the principal branch.  None means the
    numeric inversion was inconclusive (near-boundary); never silently False.
    """
    zeta = complex(zeta)
    b = -(2.0 * zeta + C * C)
    c = zeta * zeta - C * C
    disc = cmath.sqrt(b * b - 4.0 * c)
    scale = max(1.0, abs(zeta))
    best_residual = math.inf
    for w in ((-b + disc) / 2.0, (-b - disc) / 2.0):
        w = _newton_polish_kappa(w, zeta, C)
        residual = abs(sqd_kappa(w, C) - zeta)
        best_residual = min(best_residual, residual)
        if residual <= tol * scale and w.real > 0:
            return True
    if best_residual <= tol * scale:
        return False  # inverted fine, but the preimage is not in C+
    if best_residual <= math.sqrt(tol) * scale:
        return None
    return False


def _newton_polish_kappa(w: complex, zeta: complex, C: float, steps: int = 8) -> complex:
    for _ in range(steps):
        root = cmath.sqrt(w + 1)
        fval = w + C * root - zeta
        fprime = 1 + C / (2 * root) if root != 0 else 1
        step = fval / fprime
        w = w - step
        if abs(step) < 1e-15 * max(1.0, abs(w)):
            break
    return w


def sqd_im_extent(x: float, C: float) -> float:
    """The boundary ordinate y at abscissa x (bisection on the monotone x(r))."""
    if x < sqd_boundary(0.0, C).real:
        raise DomainError(f"abscissa {x} left of the domain tip")
    lo, hi = 0.0, max(1.0, 4.0 * x)
    while sqd_boundary(hi, C).real < x:
        hi *= 2.0
        if hi > 1e12:
            raise DomainError("boundary inversion diverged")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sqd_boundary(mid, C).real < x:
            lo = mid
        else:
            hi = mid
    return sqd_boundary(0.5 * (lo + hi), C).imag


def domain_member(dom: DomainSpec, zeta: complex, R: float | None = None):
    """Membership (with optional Re >= R cut); True/False/None as in sqd_membership."""
    if R is not None and zeta.real < R:
        return False
    if dom.kind == "standard_quadratic":
        return sqd_membership(zeta, dom.C)
    if dom.kind == "lower_upper":
        if zeta.real < dom.t:
            return False
        return dom.h_l(zeta.real) < zeta.imag < dom.h_u(zeta.real)
    raise DomainError(f"unknown domain kind {dom.kind}")


# -- upper/lower map criteria ----------------------------------------------------


@dataclass
class MapCheckReport:
    ok: bool
    threshold: float | None
    witnesses: list = field(default_factory=list)
    derivative_ok: bool = True
    difference_ok: bool = True


def _grid(t: float, interval: float, n: int) -> list[float]:
    return [t + interval * i / (n - 1) for i in range(n)]


def upper_map_check(
    h, d: float, t: float, interval: float, spec: AsymptoticSpec, dh=None, n: int = 200
) -> MapCheckReport:
    """Check h'(x) >= d + h(x)/x and the defining finite-difference inequality
    h(x + rho(x)) - h(x) >= (alpha-1) h(x) + M(x) on a grid over [t, t+interval].

    Returns the first grid threshold from which both hold to the right.
    """
    if dh is None:
        eps = 1e-6 * max(1.0, interval)
        dh = lambda x: (h(x + eps) - h(x - eps)) / (2 * eps)
    xs = _grid(t, interval, n)
    ok_from = None
    witnesses = []
    deriv_ok = diff_ok = True
    for x in xs:
        try:
            rx = spec.rho(x)
        except DomainError:
            witnesses.append((x, "outside M domain"))
            ok_from = None
            continue
        c1 = dh(x) >= d + h(x) / x
        c2 = rx > 0 and h(x + rx) - h(x) >= (spec.alpha - 1) * h(x) + spec.M(x)
        if c1 and c2:
            if ok_from is None:
                ok_from = x
        else:
            if not c1:
                deriv_ok = False
            if not c2:
                diff_ok = False
            witnesses.append((x, "derivative" if not c1 else "difference"))
            ok_from = None
    return MapCheckReport(ok_from is not None, ok_from, witnesses, deriv_ok, diff_ok)


def lower_map_check(
    h, d: float, t: float, interval: float, spec: AsymptoticSpec, dh=None, n: int = 200
) -> MapCheckReport:
    """Mirror criterion: h'(x) <= h(x)/x - d and
    h(x + rho(x)) - h(x) <= (alpha-1) h(x) - M(x)."""
    if dh is None:
        eps = 1e-6 * max(1.0, interval)
        dh = lambda x: (h(x + eps) - h(x - eps)) / (2 * eps)
    xs = _grid(t, interval, n)
    ok_from = None
    witnesses = []
    deriv_ok = diff_ok = True
    for x in xs:
        try:
            rx = spec.rho(x)
        except DomainError:
            witnesses.append((x, "outside M domain"))
            ok_from = None
            continue
        c1 = dh(x) <= h(x) / x - d
        c2 = rx > 0 and h(x + rx) - h(x) <= (spec.alpha - 1) * h(x) - spec.M(x)
        if c1 and c2:
            if ok_from is None:
                ok_from = x
        else:
            if not c1:
                deriv_ok = False
            if not c2:
                diff_ok = False
            witnesses.append((x, "derivative" if not c1 else "difference"))
            ok_from = None
    return MapCheckReport(ok_from is not None, ok_from, witnesses, deriv_ok, diff_ok)


# -- invariance certification ------------------------------------------------------


def _domain_samples(dom: DomainSpec, R: float, span: float, n: int) -> list[complex]:
    """Interior and boundary-adjacent samples of D_R with Re in [R, R+span]."""
    out = []
    for i in range(n):
        x = R + span * i / max(1, n - 1)
        if dom.kind == "standard_quadratic":
            try:
                y = sqd_im_extent(x, dom.C)
            except DomainError:
                continue
        else:
            if x < dom.t:
                continue
            y = dom.h_u(x)
        for frac in (0.0, 0.5, 0.95):
            out.append(complex(x, frac * y))
            if frac:
                out.append(complex(x, -frac * y))
    return out


def invariant_threshold(
    f,
    spec: AsymptoticSpec,
    dom: DomainSpec,
    r_start: float | None = None,
    r_ceiling: float = 64.0,
    span: float = 8.0,
    n_samples: int = 16,
) -> float:
    """Smallest grid-certified R such that D_R looks f-invariant.

    Certifies on samples: rho(R) > 0 and increasing, the defect bound
    |f(z) - alpha z| <= M(Re z), and the step rectangle
    [Re+rho(Re), alpha Re+M(Re)] x [alpha Im -+ M(Re)] inside the domain.
    Raises CertificationError if no R below the ceiling passes.
    """
    lo = iter_exp(0.0, spec.k) + 1e-6
    R = max(r_start if r_start is not None else lo + 0.5, lo)
    last_reasons = []
    while R <= r_ceiling:
        reasons = _certify_at(f, spec, dom, R, span, n_samples)
        if not reasons:
            return R
        last_reasons = reasons
        R = R * 1.5 if R > 1 else R + 0.5
    raise CertificationError(
        f"no invariant threshold below ceiling {r_ceiling}: {last_reasons[:3]}"
    )


def _certify_at(f, spec, dom, R, span, n_samples) -> list:
    reasons = []
    try:
        r0 = spec.rho(R)
    except DomainError as e:
        return [("rho-domain", R, str(e))]
    if r0 <= 0:
        return [("rho<=0", R, r0)]
    xs = _grid(R, span, 8)
    rhos = [spec.rho(x) for x in xs]
    if any(b <= a for a, b in zip(rhos, rhos[1:])):
        reasons.append(("rho-not-increasing", R))
    for zeta in _domain_samples(dom, R, span, n_samples):
        if domain_member(dom, zeta, R) is False:
            continue
        defect = abs(f(zeta) - spec.alpha * zeta)
        bound = spec.M(zeta.real)
        if defect > bound:
            reasons.append(("defect-bound", zeta, defect, bound))
            continue
        mx = spec.M(zeta.real)
        rect_re = (zeta.real + spec.rho(zeta.real), spec.alpha * zeta.real + mx)
        rect_im = (spec.alpha * zeta.imag - mx, spec.alpha * zeta.imag + mx)
        corners = [
            complex(a, b)
            for a in rect_re
            for b in rect_im
        ] + [complex(0.5 * sum(rect_re), b) for b in rect_im]
        for c in corners:
            if domain_member(dom, c) is False:
                reasons.append(("rectangle-escape", zeta, c))
                break
    return reasons
