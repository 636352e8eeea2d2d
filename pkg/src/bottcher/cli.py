"""Command-line interface: parse expressions, run the pipelines, emit JSON/CSV.

Exit codes: 0 success, 2 shape/precondition error, 3 certification failure,
4 parse error.  A key=value config file (path in $BOTTCHER_CONFIG) supplies
defaults for the truncation caps and tolerances.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .coeffs import EXACT, FLOAT
from .domains import AsymptoticSpec, DomainSpec, invariant_threshold
from .dulac import (
    compare_formal_numeric,
    dulac_normalize_full,
    from_transseries,
    to_zeta_chart,
)
from .errors import (
    BottcherError,
    CertificationError,
    ParseError,
)
from .io_json import (
    dulac_z_to_json,
    dulac_zeta_from_json,
    dulac_zeta_to_json,
    normalization_result_to_json,
    series_from_json,
    series_to_json,
)
from .koenigs import (
    homological_residual,
    identity_deviation_bound,
    koenigs_normalize,
    koenigs_residual,
    solve_homological,
)
from .normalize import (
    bottcher_sequence,
    normalize,
    prenormalize,
    support_predict,
    enumerate_semigroup,
)
from .parser import parse
from .printer import format_series
from .series import TruncationGrid, sub, monomial
from .keys import Key


@dataclass
class RunConfig:
    depth: int | None = None
    z_cap: Fraction = Fraction(12)
    block_cap: int = 10
    ell_stop: int = 16
    mode: str = EXACT
    tol: float = 1e-11
    r_ceiling: float = 64.0
    precision: int | None = None  # mpmath working digits for analytic evaluation
    samples: str = "3:10:25"  # default analytic grid spec R0:SPAN:N

    @staticmethod
    def from_env_and_args(args) -> "RunConfig":
        cfg = RunConfig()
        path = os.environ.get("BOTTCHER_CONFIG")
        if path and os.path.exists(path):
            for line in open(path):
                line = line.strip()
                if not line or line.startswith("#") or "=" not in line:
                    continue
                k, v = (s.strip() for s in line.split("=", 1))
                if k == "z_cap":
                    cfg.z_cap = Fraction(v)
                elif k == "block_cap":
                    cfg.block_cap = int(v)
                elif k == "ell_stop":
                    cfg.ell_stop = int(v)
                elif k == "depth":
                    cfg.depth = int(v)
                elif k == "mode":
                    cfg.mode = v
                elif k == "tol":
                    cfg.tol = float(v)
                elif k == "r_ceiling":
                    cfg.r_ceiling = float(v)
                elif k == "precision":
                    cfg.precision = int(v)
                elif k == "samples":
                    cfg.samples = v
        for k in ("z_cap", "block_cap", "depth", "tol", "ell_stop", "precision"):
            v = getattr(args, k.replace("-", "_"), None)
            if v is not None:
                if k == "z_cap":
                    cfg.z_cap = Fraction(v)
                elif k == "tol":
                    cfg.tol = float(v)
                else:
                    setattr(cfg, k, int(v))
        if getattr(args, "samples", None):
            cfg.samples = args.samples
        if getattr(args, "float_mode", False):
            cfg.mode = FLOAT
        return cfg

    def grid_for(self, text_depth: int) -> TruncationGrid:
        depth = self.depth if self.depth is not None else text_depth
        return TruncationGrid(self.z_cap, self.block_cap, depth, self.ell_stop)


def _parse_expr(text: str, cfg: RunConfig):
    probe = parse(text, mode=cfg.mode, z_cap=cfg.z_cap, block_cap=cfg.block_cap)
    grid = cfg.grid_for(probe.depth)
    return parse(text, grid=grid, mode=cfg.mode)


def _emit(args, payload: dict, text: str):
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _add_common(p):
    p.add_argument("--z-cap", dest="z_cap")
    p.add_argument("--block-cap", dest="block_cap", type=int)
    p.add_argument("--ell-stop", dest="ell_stop", type=int)
    p.add_argument("--depth", dest="depth", type=int)
    p.add_argument("--float", dest="float_mode", action="store_true")
    p.add_argument("--json", action="store_true")


def _term_map(alpha: float, terms, precision: int | None = None):
    """f(zeta) = alpha zeta + sum c zeta^p e^(-nu zeta) from 'c,p,nu' specs."""
    import cmath

    if precision:
        import mpmath

        mpmath.mp.dps = precision
        exp = mpmath.exp
    else:
        exp = cmath.exp
    parsed = []
    for spec in terms or []:
        c, p, nu = spec.split(",")
        parsed.append((float(c), int(p), float(nu)))

    def f(zeta):
        out = alpha * zeta
        for c, p, nu in parsed:
            out = out + c * zeta**p * exp(-nu * zeta)
        return out

    return f


def _sample_point(x: float, precision: int | None):
    if precision:
        import mpmath

        return mpmath.mpc(x, 0.0)
    return complex(x, 0.0)


def cmd_normalize(args) -> int:
    cfg = RunConfig.from_env_and_args(args)
    f = _parse_expr(args.expr, cfg)
    res = normalize(f)
    payload = normalization_result_to_json(res)
    _emit(
        args,
        payload,
        f"phi = {format_series(res.phi)}\n"
        f"alpha = {res.alpha}, beta = {res.beta}, iterations = {res.iterations}, "
        f"achieved_order = {res.achieved_order}\n"
        f"verification: {res.verification}",
    )
    return 0 if res.verification.get("conjugation_exact_below_frontier", True) else 3


def cmd_prenormalize(args) -> int:
    cfg = RunConfig.from_env_and_args(args)
    f = _parse_expr(args.expr, cfg)
    phi1 = prenormalize(f)
    _emit(args, series_to_json(phi1), f"phi1 = {format_series(phi1)}")
    return 0


def cmd_bottcher_seq(args) -> int:
    cfg = RunConfig.from_env_and_args(args)
    f = _parse_expr(args.expr, cfg)
    seed = _parse_expr(args.seed, cfg) if args.seed else None
    if seed is None:
        from .series import identity_series

        seed = identity_series(f.grid, f.mode)
    out = bottcher_sequence(f, seed, args.n)
    _emit(args, series_to_json(out), format_series(out))
    return 0


def cmd_support(args) -> int:
    cfg = RunConfig.from_env_and_args(args)
    f = _parse_expr(args.expr, cfg)
    spec = support_predict(f)
    gens = [{"z": str(g.z), "l": list(g.l)} for g in spec.generators]
    payload = {"generators": gens, "cutoff": str(spec.cutoff.z)}
    if args.enumerate is not None:
        keys = enumerate_semigroup(spec, ell_window=args.enumerate)
        payload["enumeration"] = [{"z": str(k.z), "l": list(k.l)} for k in keys]
    _emit(
        args,
        payload,
        "generators: " + ", ".join(f"({g.z},{list(g.l)})" for g in spec.generators),
    )
    return 0


def cmd_verify(args) -> int:
    cfg = RunConfig.from_env_and_args(args)
    f = _parse_expr(args.f, cfg)
    if args.phi_file:
        phi = series_from_json(json.load(open(args.phi_file)))
    else:
        phi = _parse_expr(args.phi, cfg)
    from .compose import conjugate, shape_of

    alpha = shape_of(f).alpha
    conj = conjugate(phi, f)
    target = monomial(Key(alpha, (0,) * conj.depth), conj.grid, conj.mode)
    residual = sub(conj, target)
    bad = [k for k in residual.terms if k < residual.frontier]
    ok = not bad
    from .keys import Cut as _Cut

    fr = residual.frontier
    payload = {"pass": ok, "checked_below": {"z": str(fr.z), "l": "cut" if isinstance(fr, _Cut) else list(fr.l)}}
    if bad:
        payload["first_bad_key"] = {"z": str(min(bad).z), "l": list(min(bad).l)}
    _emit(args, payload, f"verify: {'PASS' if ok else 'FAIL'} (below {residual.frontier.z})")
    return 0 if ok else 3


def cmd_analytic(args) -> int:
    cfg = RunConfig.from_env_and_args(args)
    spec = AsymptoticSpec(alpha=args.alpha, eps=args.eps, k=args.k)
    dom = DomainSpec.standard_quadratic(args.sqd_C)
    prec = cfg.precision
    if args.analytic_cmd == "domain-check":
        R = invariant_threshold(_term_map(args.alpha, args.term), spec, dom,
                                r_ceiling=args.r_ceiling)
        _emit(args, {"R": R}, f"certified R = {R}")
        return 0
    if args.analytic_cmd == "koenigs":
        f = _term_map(args.alpha, args.term, prec)
        R = invariant_threshold(_term_map(args.alpha, args.term), spec, dom,
                                r_ceiling=args.r_ceiling)
        result = koenigs_normalize(f, spec, dom, R, tol=args.tol)
        r0, span, n = (float(x) for x in cfg.samples.split(":"))
        rows = []
        for i in range(int(n)):
            zeta = _sample_point(r0 + span * i / max(1, int(n) - 1), prec)
            phi = result.evaluator(zeta)
            rows.append(
                {
                    "zeta": float(zeta.real),
                    "phi_re": float(phi.real),
                    "phi_im": float(phi.imag),
                    "residual": float(koenigs_residual(result, f, zeta)),
                    "tail_bound": result.tail_bound(zeta),
                    "id_bound": identity_deviation_bound(result, zeta),
                }
            )
        if args.csv:
            with open(args.csv, "w") as fh:
                fh.write("zeta,phi_re,phi_im,residual,bound\n")
                for r in rows:
                    fh.write(
                        f"{r['zeta']},{r['phi_re']},{r['phi_im']},{r['residual']},{r['tail_bound']}\n"
                    )
        _emit(args, {"R": R, "samples": rows}, f"R = {R}; worst residual = {max(r['residual'] for r in rows):.3e}")
        return 0
    if args.analytic_cmd == "homological":
        f = _term_map(args.alpha, args.f_term, prec)
        g = _term_map(0.0, args.g_term, prec)
        R = invariant_threshold(_term_map(args.alpha, args.f_term), spec, dom,
                                r_ceiling=args.r_ceiling)
        res = solve_homological(f, g, args.nu, spec, dom, R, tol=args.tol)
        r0, span, n = (float(x) for x in cfg.samples.split(":"))
        worst = 0.0
        for i in range(int(n)):
            zeta = _sample_point(r0 + span * i / max(1, int(n) - 1), prec)
            worst = max(worst, float(homological_residual(res, f, g, zeta)))
        _emit(args, {"R": R, "worst_residual": worst}, f"R = {R}; worst residual = {worst:.3e}")
        return 0
    raise BottcherError(f"unknown analytic subcommand {args.analytic_cmd}")


def cmd_bridge(args) -> int:
    cfg = RunConfig.from_env_and_args(args)
    if args.bridge_cmd == "to-zeta":
        f = _parse_expr(args.expr, cfg)
        d = from_transseries(f)
        out = to_zeta_chart(d, e_cap=Fraction(args.e_cap) if args.e_cap else None)
        print(json.dumps(dulac_zeta_to_json(out), indent=2))
        return 0
    if args.bridge_cmd == "to-z":
        data = json.load(open(args.infile) if args.infile else sys.stdin)
        from .dulac import to_z_chart

        out = to_z_chart(dulac_zeta_from_json(data))
        print(json.dumps(dulac_z_to_json(out), indent=2))
        return 0
    if args.bridge_cmd == "compare":
        f_ts = _parse_expr(args.expr, cfg)
        d = from_transseries(f_ts)
        phi_hat_z, res = dulac_normalize_full(d, z_cap=cfg.z_cap, block_cap=cfg.block_cap)
        phi_hat = to_zeta_chart(phi_hat_z)
        spec = AsymptoticSpec(alpha=float(d.alpha), eps=args.eps, k=args.k)
        dom = DomainSpec.standard_quadratic(args.sqd_C)
        from .dulac import evaluate_zeta

        f_zeta = to_zeta_chart(d)
        fmap = lambda zeta: evaluate_zeta(f_zeta, zeta)
        R = invariant_threshold(fmap, spec, dom, r_ceiling=args.r_ceiling)
        numeric = koenigs_normalize(fmap, spec, dom, R, tol=args.tol)
        xs = [R + args.ray_span * i / 63 for i in range(64)]
        reports = {}
        stats = {}
        for n in range(1, min(args.n, len(phi_hat.ladder)) + 1):
            reports[n] = compare_formal_numeric(numeric, phi_hat, n, xs)
            stats[n] = reports[n].pop("statistic", [])
        if args.csv:
            with open(args.csv, "w") as fh:
                fh.write("re_zeta," + ",".join(f"n{n}" for n in sorted(stats)) + "\n")
                for i, x in enumerate(xs):
                    row = [f"{x}"] + [f"{stats[n][i]}" for n in sorted(stats)]
                    fh.write(",".join(row) + "\n")
        payload = {"R": R, "reports": reports}
        _emit(args, payload, "\n".join(f"n={n}: pass={r['pass']} sup={r['sup']:.3e}" for n, r in reports.items()))
        return 0 if all(r["pass"] for r in reports.values()) else 3
    raise BottcherError(f"unknown bridge subcommand {args.bridge_cmd}")


def cmd_selftest(args) -> int:
    """Fast built-in checks of the exact pipeline anchors."""
    from .coeffs import Exact
    from .normalize import bottcher_R_op
    from .series import identity_series

    f = parse("z^2 + z^2*l1", mode=EXACT, z_cap=6, block_cap=8)
    ident = identity_series(f.grid, f.mode)
    r1 = bottcher_R_op(f, ident)
    ok1 = r1.coeff(Key(1, (1,))) == Exact.of(Fraction(1, 2))
    res = normalize(parse("z^2 + z^3", mode=EXACT, z_cap=8, block_cap=8))
    ok2 = res.phi.coeff(Key(2, (0,) * res.phi.depth)) == Exact.of(Fraction(1, 2))
    ok = ok1 and ok2
    print(f"selftest: {'PASS' if ok else 'FAIL'} (R-op anchor {ok1}, Bottcher anchor {ok2})")
    return 0 if ok else 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bottcher", description=__doc__)
    sp = ap.add_subparsers(dest="cmd", required=True)

    p = sp.add_parser("normalize", help="full formal normalization of an expression")
    p.add_argument("expr")
    _add_common(p)
    p.set_defaults(fn=cmd_normalize)

    p = sp.add_parser("prenormalize", help="canonical same-order block removal")
    p.add_argument("expr")
    _add_common(p)
    p.set_defaults(fn=cmd_prenormalize)

    p = sp.add_parser("bottcher-seq", help="n-th iterate of the Bottcher operator")
    p.add_argument("expr")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_bottcher_seq)

    p = sp.add_parser("support", help="semigroup support predictor")
    p.add_argument("expr")
    p.add_argument("--enumerate", type=int, default=None, metavar="ELL_WINDOW")
    _add_common(p)
    p.set_defaults(fn=cmd_support)

    p = sp.add_parser("verify", help="check phi o f o phi^-1 = z^alpha below frontier")
    p.add_argument("--f", required=True)
    p.add_argument("--phi", default=None)
    p.add_argument("--phi-file", dest="phi_file", default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_verify)

    p = sp.add_parser("analytic", help="domain certification / Koenigs / homological")
    p.add_argument("analytic_cmd", choices=["domain-check", "koenigs", "homological"])
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--sqd-C", dest="sqd_C", type=float, default=1.0)
    p.add_argument("--r-ceiling", dest="r_ceiling", type=float, default=64.0)
    p.add_argument("--tol", type=float, default=1e-11)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--term", action="append", default=None, metavar="c,p,nu")
    p.add_argument("--f-term", dest="f_term", action="append", default=None)
    p.add_argument("--g-term", dest="g_term", action="append", default=None)
    p.add_argument("--samples", default=None, help="grid spec R0:SPAN:N")
    p.add_argument("--precision", type=int, default=None, help="mpmath digits")
    p.add_argument("--csv", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_analytic)

    p = sp.add_parser("bridge", help="Dulac chart conversions and comparison")
    p.add_argument("bridge_cmd", choices=["to-zeta", "to-z", "compare"])
    p.add_argument("expr", nargs="?")
    p.add_argument("--e-cap", dest="e_cap", default=None)
    p.add_argument("--infile", default=None)
    p.add_argument("--csv", default=None)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--sqd-C", dest="sqd_C", type=float, default=1.0)
    p.add_argument("--r-ceiling", dest="r_ceiling", type=float, default=64.0)
    p.add_argument("--tol", type=float, default=1e-11)
    p.add_argument("--ray-span", dest="ray_span", type=float, default=12.0)
    _add_common(p)
    p.set_defaults(fn=cmd_bridge)

    p = sp.add_parser("selftest", help="fast built-in anchor checks")
    _add_common(p)
    p.set_defaults(fn=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 4
    except CertificationError as e:
        print(f"certification failed: {e}", file=sys.stderr)
        return 3
    except BottcherError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
