"""Canonical text form: terms lex-ascending, rationals as p/q.

This is the golden-file format: `parse(format_series(f))` reproduces f for
exact series whose coefficients are plain complex rationals.  Coefficients
that carry the log-of-alpha symbol print with `LG` and are not re-parseable
(they only occur in machine-generated output; use JSON for round-trips).
"""

from __future__ import annotations

from fractions import Fraction

from .coeffs import Exact


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_coeff(c) -> tuple[str, bool]:
    """Return (text, needs_explicit_sign_handling_done) with text sign-free or wrapped."""
    if isinstance(c, Exact):
        if c.is_rational_complex():
            re, im = c.rational_parts()
            if im == 0:
                if re < 0:
                    return "-" + _frac_str(-re), True
                return _frac_str(re), True
            if re == 0 and im == 1:
                return "(0+1i)", True
            sign = "+" if im >= 0 else "-"
            return f"({_frac_str(re)}{sign}{_frac_str(abs(im))}i)", True
        monos = []
        for k in sorted(c.parts):
            re, im = c.parts[k]
            base = _frac_str(re) if im == 0 else f"({_frac_str(re)}+{_frac_str(im)}i)"
            if k == ():
                monos.append(base)
            else:
                sym = "*".join(
                    f"log({p})" if e == 1 else f"log({p})^{e}" for p, e in k
                )
                monos.append(f"{base}*{sym}")
        return "(" + " + ".join(monos) + ")", True
    if isinstance(c, complex):
        if c.imag == 0:
            r = c.real
            return (repr(r), True)
        return f"({c.real!r}+{c.imag!r}i)", True
    return str(c), True


def format_monomial(key) -> str:
    parts = []
    if key.z != 0:
        if key.z == 1:
            parts.append("z")
        else:
            zs = _frac_str(key.z) if isinstance(key.z, Fraction) else repr(key.z)
            parts.append(f"z^{zs}" if "/" not in zs else f"z^({zs})")
    for j, n in enumerate(key.l, start=1):
        if n == 0:
            continue
        parts.append(f"l{j}" if n == 1 else f"l{j}^{n}")
    return "*".join(parts)


def format_series(f) -> str:
    if not f.terms:
        return "0"
    out = []
    for key, c in f.sorted_terms():
        ctxt, _ = format_coeff(c)
        mono = format_monomial(key)
        if mono:
            if ctxt == "1":
                txt = mono
            elif ctxt == "-1":
                txt = "-" + mono
            else:
                txt = f"{ctxt}*{mono}"
        else:
            txt = ctxt
        out.append(txt)
    text = out[0]
    for t in out[1:]:
        if t.startswith("-"):
            text += " - " + t[1:]
        else:
            text += " + " + t
    return text
