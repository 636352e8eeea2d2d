"""JSON wire formats for series, normalization results and Dulac ladders."""

from __future__ import annotations

from fractions import Fraction

from .coeffs import EXACT, Exact
from .keys import Cut, Key
from .series import TransSeries, TruncationGrid, make_series


def _frac(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def _zexp_out(z):
    return _frac(z) if isinstance(z, Fraction) else float(z)


def _zexp_in(v):
    return Fraction(v) if isinstance(v, str) else float(v)


def _mono_str(k: tuple) -> str:
    return ",".join(f"{p}:{e}" for p, e in k)


def _mono_parse(s: str) -> tuple:
    if not s:
        return ()
    return tuple((int(p), int(e)) for p, e in (q.split(":") for q in s.split(",")))


def coeff_to_json(c) -> dict:
    if isinstance(c, Exact):
        out = {}
        re, im = c.parts.get((), (Fraction(0), Fraction(0)))
        out["re"] = _frac(re)
        out["im"] = _frac(im)
        higher = {
            _mono_str(k): [_frac(a), _frac(b)] for k, (a, b) in c.parts.items() if k
        }
        if higher:
            out["lg"] = higher
        return out
    z = complex(c)
    return {"re": z.real, "im": z.imag}


def coeff_from_json(d: dict, mode: str):
    if mode == EXACT:
        parts = {(): (Fraction(d["re"]), Fraction(d["im"]))}
        for k, (a, b) in d.get("lg", {}).items():
            parts[_mono_parse(k)] = (Fraction(a), Fraction(b))
        return Exact(parts)
    return complex(float(d["re"]), float(d["im"]))


def series_to_json(f: TransSeries) -> dict:
    terms = []
    for k, c in f.sorted_terms():
        entry = {"z": _zexp_out(k.z), "l": list(k.l)}
        entry.update(coeff_to_json(c))
        terms.append(entry)
    return {
        "depth": f.depth,
        "mode": f.mode,
        "terms": terms,
        "frontier": (
            {"z": _zexp_out(f.frontier.z), "cut": True}
            if isinstance(f.frontier, Cut)
            else {"z": _zexp_out(f.frontier.z), "l": list(f.frontier.l)}
        ),
        "grid": {
            "z_cap": _zexp_out(f.grid.z_cap),
            "block_cap": f.grid.block_cap,
            "ell_stop": f.grid.ell_stop,
        },
    }


def series_from_json(d: dict) -> TransSeries:
    depth = d["depth"]
    mode = d["mode"]
    g = d.get("grid", {})
    grid = TruncationGrid(
        z_cap=Fraction(g.get("z_cap", "16")) if isinstance(g.get("z_cap", "16"), str) else g.get("z_cap", 16),
        block_cap=g.get("block_cap", 10),
        depth=depth,
        ell_stop=g.get("ell_stop", 16),
    )
    terms = {}
    for entry in d["terms"]:
        key = Key(_zexp_in(entry["z"]), entry["l"])
        terms[key] = coeff_from_json(entry, mode)
    fr = d.get("frontier")
    cands = []
    if fr:
        cands = [Cut(_zexp_in(fr["z"])) if fr.get("cut") else Key(_zexp_in(fr["z"]), fr["l"])]
    return make_series(terms, grid, mode, cands)


def normalization_result_to_json(res) -> dict:
    out = {
        "alpha": _zexp_out(res.alpha),
        "beta": _zexp_out(res.beta),
        "iterations": res.iterations,
        "achieved_order": _zexp_out(res.achieved_order),
        "phi": series_to_json(res.phi),
        "phi1": series_to_json(res.phi1),
        "phi2": series_to_json(res.phi2),
        "verification": {
            k: v for k, v in res.verification.items() if k != "iterates"
        },
    }
    if res.psi is not None:
        out["psi"] = series_to_json(res.psi)
    if res.alpha_input is not None:
        out["alpha_input"] = _zexp_out(res.alpha_input)
    out["inverted_input"] = res.inverted_input
    return out


def dulac_z_to_json(d) -> dict:
    return {
        "lambda": coeff_to_json(d.lam),
        "alpha": _zexp_out(d.alpha),
        "mode": d.mode,
        "ladder": [
            {"exp": _zexp_out(a), "P": [coeff_to_json(c) for c in p]}
            for a, p in d.ladder
        ],
    }


def dulac_z_from_json(d: dict):
    from .dulac import DulacSeriesZ

    mode = d.get("mode", EXACT)
    return DulacSeriesZ(
        coeff_from_json(d["lambda"], mode),
        _zexp_in(d["alpha"]),
        [
            (_zexp_in(e["exp"]), [coeff_from_json(c, mode) for c in e["P"]])
            for e in d["ladder"]
        ],
        mode,
    )


def dulac_zeta_to_json(d) -> dict:
    return {
        "alpha": _zexp_out(d.alpha),
        "c0": coeff_to_json(d.c0),
        "mode": d.mode,
        "ladder": [
            {"beta": _zexp_out(b), "Q": [coeff_to_json(c) for c in q]}
            for b, q in d.ladder
        ],
    }


def dulac_zeta_from_json(d: dict):
    from .dulac import DulacSeriesZeta

    mode = d.get("mode", EXACT)
    return DulacSeriesZeta(
        _zexp_in(d["alpha"]),
        coeff_from_json(d["c0"], mode),
        [
            (_zexp_in(e["beta"]), [coeff_from_json(c, mode) for c in e["Q"]])
            for e in d["ladder"]
        ],
        mode,
    )
