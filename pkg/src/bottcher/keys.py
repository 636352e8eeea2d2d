"""Exponent keys: points of R x Z^k ordered lexicographically.

A key holds the exponent of z (rational in exact computations, float
allowed for irrational exponents in float mode) together with the integer
exponents of the iterated logarithms l1..lK.  Keys form an ordered
commutative monoid under componentwise addition; the total order is
lexicographic on (z_exp, log_exps[0], ..., log_exps[K-1]).
"""

from __future__ import annotations

from fractions import Fraction


def as_zexp(x) -> Fraction | float:
    """Coerce a z-exponent to Fraction when possible, float otherwise."""
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    if isinstance(x, float):
        return x
    return Fraction(x)


class _NegInf:
    """Singleton standing below every log-exponent tuple in comparisons."""

    __slots__ = ()

    def __lt__(self, other):
        return not isinstance(other, _NegInf)

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return isinstance(other, _NegInf)

    def __eq__(self, other):
        return isinstance(other, _NegInf)

    def __hash__(self):
        return hash("neg-inf-logs")

    def __repr__(self):
        return "-inf"


NEG_INF_LOGS = _NegInf()


class Key:
    """A point (z_exp, log_exps) of R x Z^k with lex order."""

    __slots__ = ("z", "l", "_t")

    def __init__(self, z, l=()):
        self.z = as_zexp(z)
        self.l = tuple(int(n) for n in l)
        self._t = (self.z, self.l)

    @property
    def depth(self) -> int:
        return len(self.l)

    def pad(self, depth: int) -> "Key":
        """Embed into depth `depth` by zero-padding the log exponents."""
        if len(self.l) == depth:
            return self
        if len(self.l) > depth:
            raise ValueError(f"cannot pad key of depth {len(self.l)} to {depth}")
        return Key(self.z, self.l + (0,) * (depth - len(self.l)))

    def __eq__(self, other):
        return isinstance(other, Key) and self._t == other._t

    def __lt__(self, other):
        return self._t < other._t

    def __le__(self, other):
        return self._t <= other._t

    def __gt__(self, other):
        return self._t > other._t

    def __ge__(self, other):
        return self._t >= other._t

    def __hash__(self):
        return hash(self._t)

    def __add__(self, other):
        if isinstance(other, Cut):
            return Cut(self.z + other.z)
        if len(self.l) != len(other.l):
            raise ValueError("depth mismatch in key addition")
        return Key(self.z + other.z, tuple(a + b for a, b in zip(self.l, other.l)))

    def __sub__(self, other: "Key") -> "Key":
        if len(self.l) != len(other.l):
            raise ValueError("depth mismatch in key subtraction")
        return Key(self.z - other.z, tuple(a - b for a, b in zip(self.l, other.l)))

    def __neg__(self) -> "Key":
        return Key(-self.z, tuple(-a for a in self.l))

    def scale(self, n: int) -> "Key":
        """n-fold sum of the key (n may be 0)."""
        return Key(self.z * n, tuple(a * n for a in self.l))

    def is_positive(self) -> bool:
        """Strictly above the all-zero key in lex order."""
        return self._t > (Fraction(0), (0,) * len(self.l))

    def is_zero(self) -> bool:
        return self.z == 0 and all(n == 0 for n in self.l)

    def __repr__(self):
        return f"Key({self.z!s}, {self.l})"


class Cut:
    """The lex-infimum marker (z, -inf, ..., -inf).

    Used as a truncation frontier: every key with z-part >= z lies at or
    above the cut, whatever its log exponents.  Shares the tuple-comparison
    path with Key via the -inf sentinel; depth-free.
    """

    __slots__ = ("z", "_t")

    def __init__(self, z):
        self.z = as_zexp(z)
        self._t = (self.z, NEG_INF_LOGS)

    def pad(self, depth: int) -> "Cut":
        return self

    def __eq__(self, other):
        return isinstance(other, Cut) and self.z == other.z

    def __lt__(self, other):
        return self._t < other._t

    def __le__(self, other):
        return self._t <= other._t

    def __gt__(self, other):
        return self._t > other._t

    def __ge__(self, other):
        return self._t >= other._t

    def __hash__(self):
        return hash(self._t)

    def __add__(self, other):
        return Cut(self.z + other.z)

    def __neg__(self):
        raise ValueError("a cut marker cannot be negated")

    def scale(self, n: int) -> "Cut":
        return Cut(self.z * n)

    def is_positive(self) -> bool:
        return self.z > 0  # (z, -inf) > 0 iff z > 0

    def is_zero(self) -> bool:
        return False

    def __repr__(self):
        return f"Cut({self.z!s})"


def front_zscale(front, q):
    """Image of a frontier under the key map (z, l) -> (q z, l)."""
    if isinstance(front, Cut):
        return Cut(front.z * q)
    return Key(front.z * q, front.l)


def zero_key(depth: int) -> Key:
    return Key(0, (0,) * depth)


def z_key(depth: int, z_exp=1) -> Key:
    return Key(z_exp, (0,) * depth)


def ell_key(depth: int, m: int, power: int = 1) -> Key:
    """Key of l_m^power (1-based m)."""
    if not 1 <= m <= depth:
        raise ValueError(f"log index {m} outside depth {depth}")
    l = [0] * depth
    l[m - 1] = power
    return Key(0, tuple(l))


def min_key(a: Key | None, b: Key | None) -> Key | None:
    """Min of two keys where None stands for +infinity."""
    if a is None:
        return b
    if b is None:
        return a
    return a if a <= b else b
