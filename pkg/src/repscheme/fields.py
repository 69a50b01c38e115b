"""Exact arithmetic in towers of quadratic extensions of the rationals.

A tower is Q(r1, r2, ..., rh) with ri**2 = ai, where each radicand ai lives in
the tower below it and is not a square there.  Elements are stored as sparse
multilinear expansions ``{mask: Fraction}``: bit k of ``mask`` says whether the
monomial contains r(k+1).

Rational values are always kept as plain ``Fraction`` objects; a
``FieldElement`` always has at least one irrational monomial.  That gives a
unique normal form, so equality is coefficient-wise.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import ParseError, TowerHeightError

DEFAULT_MAX_HEIGHT = 12


def as_scalar(value):
    """Coerce ints, strings and Fractions to the scalar normal form."""
    if isinstance(value, (Fraction, FieldElement)):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not field elements")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")


def _coeffs_of(x):
    if isinstance(x, FieldElement):
        return x.coeffs
    x = as_scalar(x)
    return {0: x} if x else {}


def _tower_of(*xs):
    tower = None
    for x in xs:
        if isinstance(x, FieldElement):
            tower = x.tower if tower is None else tower.join(x.tower)
    return tower


class FieldTower:
    """An iterated square-root extension of Q.

    Towers are compared by their radicand lists.  A tower whose radicands are
    a prefix of another's embeds into it, so elements of the two can be mixed.
    """

    def __init__(self, radicands=(), max_height=DEFAULT_MAX_HEIGHT):
        radicands = tuple(as_scalar(a) for a in radicands)
        if len(radicands) > max_height:
            raise TowerHeightError(
                f"tower height {len(radicands)} exceeds limit {max_height}")
        self.radicands = radicands
        self.max_height = max_height
        self._mono_cache = {}

    @property
    def height(self):
        return len(self.radicands)

    @property
    def degree(self):
        return 2 ** self.height

    def __eq__(self, other):
        return isinstance(other, FieldTower) and self.radicands == other.radicands

    def __hash__(self):
        return hash(self.radicands)

    def __repr__(self):
        if not self.radicands:
            return "FieldTower(Q)"
        return "FieldTower(" + ", ".join(
            f"sqrt({format_scalar(a)})" for a in self.radicands) + ")"

    def is_prefix_of(self, other):
        return other.radicands[: self.height] == self.radicands

    def join(self, other):
        if self is other or self.is_prefix_of(other):
            return other
        if other.is_prefix_of(self):
            return self
        raise ValueError(f"incompatible towers {self!r} and {other!r}")

    def radical(self, index):
        """The generator r(index+1) as a field element."""
        if not 0 <= index < self.height:
            raise IndexError(index)
        return FieldElement(self, {1 << index: Fraction(1)})

    def extend(self, radicand):
        if self.height + 1 > self.max_height:
            raise TowerHeightError(
                f"adjoining sqrt({format_scalar(radicand)}) exceeds tower height "
                f"limit {self.max_height}")
        return FieldTower(self.radicands + (as_scalar(radicand),), self.max_height)

    def names(self):
        return [f"r{k + 1}" for k in range(self.height)]

    # -- arithmetic kernels -------------------------------------------------

    def _mono_mul(self, m1, m2):
        key = (m1, m2) if m1 <= m2 else (m2, m1)
        hit = self._mono_cache.get(key)
        if hit is not None:
            return hit
        common = m1 & m2
        if not common:
            result = {m1 | m2: Fraction(1)}
        else:
            bit = 1 << (common.bit_length() - 1)
            rest = self._mono_mul(m1 ^ bit, m2 ^ bit)
            result = _mul_coeffs(self, _coeffs_of(self.radicands[bit.bit_length() - 1]), rest)
        self._mono_cache[key] = result
        return result

    # -- square roots -------------------------------------------------------

    def sqrt(self, a):
        """Return a square root of ``a`` inside this tower, or None."""
        a = as_scalar(a)
        if isinstance(a, FieldElement):
            self.join(a.tower)
        return _sqrt_in(self, _coeffs_of(a), self.height)

    def is_real(self):
        """True when every radicand is positive under the embedding ri > 0."""
        for k, a in enumerate(self.radicands):
            if not _is_real_coeffs(FieldTower(self.radicands[:k]), _coeffs_of(a)):
                return False
            if _sign_coeffs(self, _coeffs_of(a)) <= 0:
                return False
        return True

    def real_mask(self):
        """Bitmask of radicals that are real (positive radicand, real below)."""
        mask = 0
        for k, a in enumerate(self.radicands):
            coeffs = _coeffs_of(a)
            if all((m & ~mask) == 0 for m in coeffs) and _sign_coeffs(self, coeffs) > 0:
                mask |= 1 << k
        return mask


Q = FieldTower()


def _make(tower, coeffs):
    coeffs = {m: c for m, c in coeffs.items() if c}
    if not coeffs:
        return Fraction(0)
    if len(coeffs) == 1 and 0 in coeffs:
        return coeffs[0]
    return FieldElement(tower, coeffs)


def _add_into(acc, coeffs, scale=Fraction(1)):
    for m, c in coeffs.items():
        v = acc.get(m, 0) + scale * c
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)
    return acc


def _mul_coeffs(tower, x, y):
    out = {}
    for m1, c1 in x.items():
        for m2, c2 in y.items():
            if m1 & m2:
                _add_into(out, tower._mono_mul(m1, m2), c1 * c2)
            else:
                m = m1 | m2
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
    return out


def _top_bit(coeffs):
    top = 0
    for m in coeffs:
        if m > top:
            top = m
    return top.bit_length()


def _split(coeffs, level):
    """Split along radical ``level`` (1-based): coeffs = low + high * r_level."""
    bit = 1 << (level - 1)
    low, high = {}, {}
    for m, c in coeffs.items():
        if m & bit:
            high[m ^ bit] = c
        else:
            low[m] = c
    return low, high


def _inv_coeffs(tower, x):
    if not x:
        raise ZeroDivisionError("inverse of zero field element")
    level = _top_bit(x)
    if level == 0:
        return {0: 1 / x[0]}
    bit = 1 << (level - 1)
    conj = {m: (-c if m & bit else c) for m, c in x.items()}
    norm = _mul_coeffs(tower, x, conj)
    return _mul_coeffs(tower, conj, _inv_coeffs(tower, norm))


def _rational_sqrt(q):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _sqrt_in(tower, a, level):
    """Square root of coefficient dict ``a`` in the subtower of given height."""
    if not a:
        return Fraction(0)
    if level == 0:
        return _rational_sqrt(a.get(0, Fraction(0)))
    p, q = _split(a, level)
    alpha = _coeffs_of(tower.radicands[level - 1])
    r = {1 << (level - 1): Fraction(1)}
    if not q:
        s = _sqrt_in(tower, p, level - 1)
        if s is not None:
            return s
        t = _sqrt_in(tower, _mul_coeffs(tower, p, _inv_coeffs(tower, alpha)), level - 1)
        if t is not None:
            return _make(tower, _mul_coeffs(tower, _coeffs_of(t), r))
        return None
    # (x + y r)^2 = a  <=>  x^2 = (p +- n)/2 with n^2 = p^2 - q^2 alpha, y = q / 2x
    norm = _add_into(_mul_coeffs(tower, p, p),
                     _mul_coeffs(tower, _mul_coeffs(tower, q, q), alpha), Fraction(-1))
    n = _sqrt_in(tower, norm, level - 1)
    if n is None:
        return None
    for sign in (1, -1):
        x2 = {m: c / 2 for m, c in _add_into(dict(p), _coeffs_of(n), Fraction(sign)).items()}
        x = _sqrt_in(tower, x2, level - 1)
        if x is None or x == 0:
            continue
        xc = _coeffs_of(x)
        y = _mul_coeffs(tower, q, _inv_coeffs(tower, {m: 2 * c for m, c in xc.items()}))
        root = _add_into(dict(xc), _mul_coeffs(tower, y, r))
        return _make(tower, root)
    return None


def _sign_coeffs(tower, x):
    """Sign under the real embedding with every radical positive."""
    if not x:
        return 0
    level = _top_bit(x)
    if level == 0:
        return (x[0] > 0) - (x[0] < 0)
    p, q = _split(x, level)
    sp, sq = _sign_coeffs(tower, p), _sign_coeffs(tower, q)
    if sq == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq if sp == 0 else sp
    alpha = _coeffs_of(tower.radicands[level - 1])
    diff = _add_into(_mul_coeffs(tower, p, p),
                     _mul_coeffs(tower, _mul_coeffs(tower, q, q), alpha), Fraction(-1))
    s = _sign_coeffs(tower, diff)
    return sp if s > 0 else sq


def _is_real_coeffs(tower, x):
    real = tower.real_mask() if tower.height else 0
    return all((m & ~real) == 0 for m in x)


class FieldElement:
    """An irrational element of a FieldTower; rationals stay as Fraction."""

    __slots__ = ("tower", "coeffs", "_hash")

    def __init__(self, tower, coeffs):
        self.tower = tower
        self.coeffs = coeffs
        self._hash = None

    @classmethod
    def make(cls, tower, coeffs):
        return _make(tower, {m: Fraction(c) for m, c in coeffs.items()})

    def _binary(self, other):
        if isinstance(other, FieldElement):
            return self.tower.join(other.tower), other.coeffs
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.tower, ({0: Fraction(other)} if other else {})
        return None, None

    def __add__(self, other):
        tower, oc = self._binary(other)
        if tower is None:
            return NotImplemented
        return _make(tower, _add_into(dict(self.coeffs), oc))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.tower, {m: -c for m, c in self.coeffs.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        tower, oc = self._binary(other)
        if tower is None:
            return NotImplemented
        return _make(tower, _add_into(dict(self.coeffs), oc, Fraction(-1)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        tower, oc = self._binary(other)
        if tower is None:
            return NotImplemented
        if not oc:
            return Fraction(0)
        if len(oc) == 1 and 0 in oc:
            c = oc[0]
            return FieldElement(tower, {m: v * c for m, v in self.coeffs.items()})
        return _make(tower, _mul_coeffs(tower, self.coeffs, oc))

    __rmul__ = __mul__

    def inverse(self):
        return _make(self.tower, _inv_coeffs(self.tower, self.coeffs))

    def __truediv__(self, other):
        if isinstance(other, FieldElement):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        return NotImplemented

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = Fraction(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            if not (self.tower.is_prefix_of(other.tower) or other.tower.is_prefix_of(self.tower)):
                return False
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.coeffs.items()))
        return self._hash

    def __bool__(self):
        return True

    def __repr__(self):
        return f"FieldElement({format_scalar(self)})"

    def __str__(self):
        return format_scalar(self)

    def sign(self):
        """Sign in the real embedding; raises if the element is not real."""
        if not self.is_real():
            raise ValueError(f"{self} is not real")
        return _sign_coeffs(self.tower, self.coeffs)

    def is_real(self):
        return _is_real_coeffs(self.tower, self.coeffs)

    def size(self):
        return sum(scalar_size(c) for c in self.coeffs.values()) + len(self.coeffs)


# -- helpers usable on any scalar ---------------------------------------------

def inverse(x):
    x = as_scalar(x)
    if isinstance(x, FieldElement):
        return x.inverse()
    if x == 0:
        raise ZeroDivisionError("inverse of zero")
    return 1 / x


def scalar_size(x):
    if isinstance(x, FieldElement):
        return x.size()
    x = Fraction(x)
    return x.numerator.bit_length() + x.denominator.bit_length()


def is_real(x):
    return not isinstance(x, FieldElement) or x.is_real()


def sign(x):
    if isinstance(x, FieldElement):
        return x.sign()
    return (x > 0) - (x < 0)


def tower_of(*xs, default=None):
    """Smallest tower containing every argument (``default`` or Q if all rational)."""
    tower = _tower_of(*xs)
    if default is not None:
        tower = default if tower is None else default.join(tower)
    return tower if tower is not None else Q


def adjoin_sqrt(tower, a):
    """Return ``(tower', root)`` with root**2 == a.

    When ``a`` already has a square root in ``tower`` the tower comes back
    unchanged along with that witness; otherwise sqrt(a) is adjoined.
    """
    a = as_scalar(a)
    if a == 0:
        raise ValueError("adjoin_sqrt needs a nonzero element")
    if isinstance(a, FieldElement):
        tower = tower.join(a.tower)
    root = tower.sqrt(a)
    if root is not None:
        return tower, root
    extended = tower.extend(a)
    return extended, extended.radical(extended.height - 1)


def imaginary_unit(tower):
    """``(tower', i)`` with i**2 == -1, adjoining i only if needed."""
    return adjoin_sqrt(tower, -1)


# -- text format ------------------------------------------------------------

def format_fraction(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x, names=None):
    x = as_scalar(x)
    if not isinstance(x, FieldElement):
        return format_fraction(x)
    if names is None:
        names = x.tower.names()
    parts = []
    for mask in sorted(x.coeffs):
        c = x.coeffs[mask]
        mono = "*".join(names[k] for k in range(mask.bit_length()) if mask >> k & 1)
        if not mono:
            body = format_fraction(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{format_fraction(abs(c))}*{mono}"
        if not parts:
            parts.append(body if c > 0 else "-" + body)
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<rad>r\d+)|(?P<op>[-+*()]))")


def parse_scalar(text, tower=Q, line=None, col_offset=0):
    """Parse the element text format (e.g. ``1/2 - 3*r1*r2``) against ``tower``."""
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text[:pos]) + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r} in element",
                             line, col_offset + bad + 1)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), col_offset + m.start(kind) + 1))
        pos = m.end()
    tokens.append(("end", "", col_offset + len(text) + 1))
    index = 0

    def peek():
        return tokens[index]

    def take():
        nonlocal index
        tok = tokens[index]
        index += 1
        return tok

    def atom():
        kind, value, col = take()
        if kind == "num":
            return Fraction(value)
        if kind == "rad":
            k = int(value[1:]) - 1
            if not 0 <= k < tower.height:
                raise ParseError(f"unknown radical {value}", line, col)
            return tower.radical(k)
        if value == "(":
            v = expr()
            kind, value, col = take()
            if value != ")":
                raise ParseError("expected ')'", line, col)
            return v
        if value == "-":
            return -atom()
        raise ParseError(f"unexpected {value or 'end of input'!r}", line, col)

    def term():
        v = atom()
        while peek()[1] == "*":
            take()
            v = v * atom()
        return v

    def expr():
        if peek()[1] in "+-" and peek()[0] == "op":
            v = Fraction(0)
        else:
            v = term()
        while peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            t = term()
            v = v + t if op == "+" else v - t
        return v

    value = expr()
    kind, rest, col = peek()
    if kind != "end":
        raise ParseError(f"trailing input {rest!r}", line, col)
    return value


_HEADER = re.compile(r"^\s*radical\s+r(\d+)\s*=\s*sqrt\((.*)\)\s*$")


def tower_header(tower):
    """Header lines declaring each radical, e.g. ``radical r1 = sqrt(-1)``."""
    lines = []
    names = tower.names()
    for k, a in enumerate(tower.radicands):
        lines.append(f"radical {names[k]} = sqrt({format_scalar(a, names)})")
    return lines


def parse_tower(lines, max_height=DEFAULT_MAX_HEIGHT):
    tower = FieldTower(max_height=max_height)
    for lineno, raw in enumerate(lines, 1):
        m = _HEADER.match(raw)
        if not m:
            raise ParseError(f"bad radical declaration {raw!r}", lineno, 1)
        if int(m.group(1)) != tower.height + 1:
            raise ParseError(f"radicals must be declared in order; got r{m.group(1)}",
                             lineno, raw.index("r") + 1)
        radicand = parse_scalar(m.group(2), tower, lineno, m.start(2))
        if radicand == 0 or tower.sqrt(radicand) is not None:
            raise ParseError(f"r{m.group(1)}: radicand is already a square in the tower",
                             lineno, m.start(2) + 1)
        tower = tower.extend(radicand)
    return tower
