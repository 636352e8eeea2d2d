"""Certified Koenigs iteration and the Schroder-type homological solver.

The normalizing map is the uniform limit of alpha^(-n) f^on; one extra step
costs at most alpha^(-(n+1)) M(Re f^on) by the defect bound, so a geometric
majorant of the remaining tail certifies the stopping index at every point.
Arithmetic is duck-typed: feed mpmath complex numbers (and an mpmath-valued f)
for extended precision in tail-dominated regimes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .domains import AsymptoticSpec, DomainSpec, domain_member
from .errors import CertificationError, DomainError


@dataclass
class KoenigsResult:
    evaluator: object
    tail_bound: object
    iterations_used: dict = field(default_factory=dict)
    domain: DomainSpec | None = None
    spec: AsymptoticSpec | None = None
    R: float = 0.0
    tol: float = 0.0


def _tail_majorant(spec: AsymptoticSpec, x: float, n: int) -> float:
    """Upper bound for sum_{m>=n} alpha^-(m+1) M(R + m rho(R)) given Re >= x at step n."""
    a = spec.alpha
    return spec.M(x) * a ** (-n) / (a - 1.0)


def koenigs_normalize(
    f,
    spec: AsymptoticSpec,
    dom: DomainSpec | None,
    R: float,
    tol: float = 1e-11,
    max_iter: int = 10_000,
    check_domain: bool = True,
) -> KoenigsResult:
    """Evaluator for phi = lim alpha^(-n) f^on on D_R with certified tails."""
    a = spec.alpha
    rho_R = spec.rho(R)
    if rho_R <= 0:
        raise CertificationError(f"rho(R) = {rho_R} <= 0 at R = {R}")
    iterations_used: dict = {}

    def evaluator(zeta):
        w = zeta
        n = 0
        re0 = float(w.real)
        if re0 < R:
            raise DomainError(f"Re(zeta) = {re0} < R = {R}")
        while True:
            x = float(w.real)
            expected = re0 + n * rho_R
            if x < expected - 1e-9 * max(1.0, abs(expected)):
                raise CertificationError(
                    f"monotone escape violated at step {n}: Re = {x} < {expected}"
                )
            if check_domain and dom is not None and n <= 3:
                if domain_member(dom, complex(float(w.real), float(w.imag)), R) is False:
                    raise CertificationError(
                        f"iterate {n} left the domain at {complex(w):.6g}"
                    )
            if _tail_majorant(spec, x, n) < tol:
                break
            if n >= max_iter:
                raise CertificationError("iteration budget exhausted before tail < tol")
            w = f(w)
            n += 1
        iterations_used[complex(zeta)] = n
        return w * (a ** (-n))

    def tail_bound(zeta):
        n = iterations_used.get(complex(zeta))
        if n is None:
            evaluator(zeta)
            n = iterations_used[complex(zeta)]
        return _tail_majorant(spec, float(zeta.real) + n * rho_R, n)

    return KoenigsResult(evaluator, tail_bound, iterations_used, dom, spec, R, tol)


def koenigs_residual(result: KoenigsResult, f, zeta) -> float:
    """|phi(f(zeta)) - alpha phi(zeta)| at a point."""
    phi = result.evaluator
    a = result.spec.alpha
    return abs(phi(f(zeta)) - a * phi(zeta))


def identity_deviation_bound(result: KoenigsResult, zeta) -> float:
    """The tangency bound M(Re zeta)/(1 - 1/alpha) for |phi(zeta) - zeta|."""
    a = result.spec.alpha
    return result.spec.M(float(zeta.real)) / (1.0 - 1.0 / a)


def cauchy_step_bound(result: KoenigsResult, zeta, n: int) -> float:
    """Per-step majorant alpha^-(n+1) M(R + n rho(R)) of the Koenigs sequence."""
    spec = result.spec
    return spec.alpha ** (-(n + 1)) * spec.M(result.R + n * spec.rho(result.R))


def real_line_invariance_check(result: KoenigsResult, f, xs, tol: float = 1e-9) -> bool:
    """If f preserves the real samples (within tol), phi must too."""
    phi = result.evaluator
    for x in xs:
        z = complex(float(x), 0.0)
        if abs(f(z).imag) > tol:
            raise DomainError(f"f is not real-preserving at {x}")
        if abs(phi(z).imag) > tol:
            return False
    return True


# -- homological equation ---------------------------------------------------------


@dataclass
class HomologicalResult:
    evaluator: object
    tail_bound: object
    nu: float
    spec: AsymptoticSpec
    R: float


def solve_homological(
    f,
    g,
    nu: float,
    spec: AsymptoticSpec,
    dom: DomainSpec | None,
    R: float,
    tol: float = 1e-13,
    grid_check: int = 12,
    max_iter: int = 10_000,
) -> HomologicalResult:
    """phi_g = -sum_{n>=0} alpha^-(n+1) g(f^on), solving phi_g o f - alpha phi_g = g.

    Precondition |g| <= e^(-nu Re) is sampled on [R, R+10]; the remaining-tail
    majorant sum_{m>=n} alpha^-(m+1) e^(-nu Re_n) q^(m-n), q = e^(-nu rho(R))/alpha,
    certifies the stopping index pointwise.
    """
    a = spec.alpha
    rho_R = spec.rho(R)
    if rho_R <= 0:
        raise CertificationError(f"rho(R) = {rho_R} <= 0 at R = {R}")
    for i in range(grid_check):
        x = R + 10.0 * i / max(1, grid_check - 1)
        if abs(g(complex(x, 0.0))) > math.exp(-nu * x) * (1 + 1e-9):
            raise DomainError(f"|g| > e^(-nu Re) at {x}: precondition fails")
    q = math.exp(-nu * rho_R) / a

    def tail_from(x: float, n: int) -> float:
        return (a ** (-(n + 1))) * math.exp(-nu * x) / (1.0 - q)

    def evaluator(zeta):
        w = zeta
        acc = 0.0 * zeta
        n = 0
        while True:
            x = float(w.real)
            if tail_from(x, n) < tol:
                break
            if n >= max_iter:
                raise CertificationError("homological sum did not certify below tol")
            acc = acc + (a ** (-(n + 1))) * g(w)
            w = f(w)
            n += 1
        return -acc

    def tail_bound(zeta):
        return tail_from(float(zeta.real), 0)

    return HomologicalResult(evaluator, tail_bound, nu, spec, R)


def homological_residual(res: HomologicalResult, f, g, zeta) -> float:
    """|phi_g(f(zeta)) - alpha phi_g(zeta) - g(zeta)|."""
    phi = res.evaluator
    return abs(phi(f(zeta)) - res.spec.alpha * phi(zeta) - g(zeta))
