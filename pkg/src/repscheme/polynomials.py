"""Sparse multivariate polynomials with rational coefficients, plus the system JSON format."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError, ValidationError
from .fields import format_fraction
from .matrices import kernel, Matrix

# A monomial is a sorted tuple of (variable, exponent) pairs; () is the constant monomial.


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_degree(m):
    return sum(e for _, e in m)


class Polynomial:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                self.terms[tuple(sorted(m))] = c

    @classmethod
    def const(cls, c):
        return cls({(): c})

    @classmethod
    def var(cls, name):
        return cls({((name, 1),): 1})

    @staticmethod
    def coerce(x):
        if isinstance(x, Polynomial):
            return x
        return Polynomial.const(Fraction(x))

    def __add__(self, other):
        other = Polynomial.coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        p = Polynomial()
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = Polynomial()
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def __sub__(self, other):
        return self + (-Polynomial.coerce(other))

    def __rsub__(self, other):
        return Polynomial.coerce(other) - self

    def __mul__(self, other):
        other = Polynomial.coerce(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        p = Polynomial()
        p.terms = out
        return p

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers of polynomials are not polynomials")
        out = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            try:
                other = Polynomial.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def variables(self):
        return sorted({v for m in self.terms for v, _ in m})

    def degree(self):
        return max((_mono_degree(m) for m in self.terms), default=0)

    def evaluate(self, values):
        """Exact evaluation; ``values`` maps every variable to a scalar."""
        acc = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for v, e in m:
                t = t * values[v] ** e
            acc = acc + t
        return acc

    def substitute(self, images):
        """Replace variables by polynomials (missing names are kept)."""
        out = Polynomial()
        for m, c in self.terms.items():
            t = Polynomial.const(c)
            for v, e in m:
                img = images.get(v)
                t = t * ((Polynomial.var(v) if img is None else Polynomial.coerce(img)) ** e)
            out = out + t
        return out

    def diff(self, name):
        out = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(name, 0)
            if not e:
                continue
            if e == 1:
                del d[name]
            else:
                d[name] = e - 1
            key = tuple(sorted(d.items()))
            out[key] = out.get(key, 0) + c * e
        return Polynomial(out)

    def sorted_terms(self, order=None):
        """Terms in degree-lex order (highest degree first) w.r.t. a variable order."""
        rank = {v: i for i, v in enumerate(order or self.variables())}
        n = len(rank)

        def key(item):
            m = item[0]
            exps = [0] * n
            for v, e in m:
                exps[rank.get(v, n - 1)] += e
            return (-_mono_degree(m), [-x for x in exps])

        return sorted(self.terms.items(), key=key)

    def format(self, order=None):
        if not self.terms:
            return "0"
        parts = []
        rank = {v: i for i, v in enumerate(order or self.variables())}
        for m, c in self.sorted_terms(order):
            mono = "*".join(v if e == 1 else f"{v}^{e}"
                            for v, e in sorted(m, key=lambda ve: (rank.get(ve[0], 0), ve[0])))
            mag = abs(c)
            if not mono:
                body = format_fraction(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_fraction(mag)}*{mono}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Polynomial({self.format()!r})"


# -- parser -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def parse_polynomial(text, variables=None, line=None):
    """Parse ``+ - * / ^`` expressions with integer literals and parentheses.

    Division is only allowed by nonzero constants; exponents are natural numbers.
    """
    toks = []
    for mt in _TOKEN.finditer(text):
        if mt.group(0).strip() == "":
            continue
        col = mt.start() + len(mt.group(0)) - len(mt.group(0).lstrip()) + 1
        if mt.group(1):
            toks.append(("num", int(mt.group(1)), col))
        elif mt.group(2):
            toks.append(("id", mt.group(2), col))
        else:
            ch = mt.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", line, col)
            toks.append((ch, ch, col))
    pos = 0

    def peek():
        return toks[pos][0] if pos < len(toks) else None

    def col():
        return toks[pos][2] if pos < len(toks) else len(text) + 1

    def take(kind=None):
        nonlocal pos
        if pos >= len(toks) or (kind and toks[pos][0] != kind):
            raise ParseError(f"expected {kind or 'token'}", line, col())
        t = toks[pos]
        pos += 1
        return t

    def atom():
        k = peek()
        if k == "num":
            return Polynomial.const(take()[1])
        if k == "id":
            _, name, c = take()
            if variables is not None and name not in variables:
                raise ParseError(f"undeclared variable {name!r}", line, c)
            return Polynomial.var(name)
        if k == "(":
            take()
            p = expr()
            take(")")
            return p
        if k == "-":
            take()
            return -power()
        raise ParseError("expected a number, variable or '('", line, col())

    def power():
        base = atom()
        if peek() == "^":
            take()
            n = take("num")[1]
            return base ** n
        return base

    def term():
        p = power()
        while peek() in ("*", "/"):
            op = take()[0]
            c = col()
            rhs = power()
            if op == "*":
                p = p * rhs
            else:
                if rhs.variables() or rhs.is_zero():
                    raise ParseError("can only divide by a nonzero constant", line, c)
                p = p * Polynomial.const(1 / rhs.terms[()])
        return p

    def expr():
        p = term()
        while peek() in ("+", "-"):
            op = take()[0]
            rhs = term()
            p = p + rhs if op == "+" else p - rhs
        return p

    if not toks:
        raise ParseError("empty polynomial", line, 1)
    result = expr()
    if pos != len(toks):
        raise ParseError(f"unexpected {toks[pos][1]!r}", line, col())
    return result


# -- systems ------------------------------------------------------------------

@dataclass
class PolynomialSystem:
    variables: list
    polynomials: list
    base_point: dict | None = None
    labels: list = field(default_factory=list)  # optional provenance tags per polynomial

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValidationError("duplicate variable names")
        known = set(self.variables)
        for p in self.polynomials:
            extra = set(p.variables()) - known
            if extra:
                raise ValidationError(f"polynomial {p} uses undeclared variables {sorted(extra)}",
                                      obj=str(p))
        if self.base_point is not None:
            self.base_point = {k: Fraction(v) for k, v in self.base_point.items()}
            missing = known - set(self.base_point)
            if missing:
                raise ValidationError(f"base point misses variables {sorted(missing)}")

    def check_base_point(self):
        if self.base_point is None:
            raise ValidationError("system has no base point")
        for p in self.polynomials:
            if p.evaluate(self.base_point) != 0:
                raise ValidationError(f"base point does not satisfy {p.format(self.variables)} = 0",
                                      obj=p.format(self.variables))

    def is_solution(self, values):
        return all(p.evaluate(values) == 0 for p in self.polynomials)

    def jacobian_at(self, values):
        return [[p.diff(v).evaluate(values) for v in self.variables] for p in self.polynomials]

    def tangent_dimension(self, point=None):
        """dim of the Zariski tangent space at ``point`` (default: the base point)."""
        point = self.base_point if point is None else point
        if not self.polynomials:
            return len(self.variables)
        if not self.variables:
            return 0
        dim, _ = kernel(Matrix(self.jacobian_at(point)))
        return dim

    def shifted(self):
        """Translate so the base point becomes the origin."""
        images = {v: Polynomial.var(v) + self.base_point[v] for v in self.variables}
        return PolynomialSystem(list(self.variables),
                                [p.substitute(images) for p in self.polynomials],
                                {v: 0 for v in self.variables})

    def to_json(self):
        out = {"vars": list(self.variables),
               "polys": [p.format(self.variables) for p in self.polynomials]}
        if self.base_point is not None:
            out["base_point"] = {k: format_fraction(self.base_point[k]) for k in self.variables}
        return out

    def dumps(self):
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, data, source=None):
        if not isinstance(data, dict) or "vars" not in data or "polys" not in data:
            raise ParseError("system JSON needs 'vars' and 'polys'", source=source)
        variables = [str(v) for v in data["vars"]]
        for v in variables:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
                raise ParseError(f"bad variable name {v!r}", source=source)
        polys = []
        for k, text in enumerate(data["polys"], 1):
            try:
                polys.append(parse_polynomial(str(text), set(variables), line=k))
            except ParseError as e:
                raise ParseError(f"polys[{k - 1}]: {e.message}", e.line, e.column, source) from None
        base = data.get("base_point")
        if base is not None:
            try:
                base = {str(k): Fraction(str(v)) for k, v in base.items()}
            except (ValueError, ZeroDivisionError) as e:
                raise ParseError(f"bad base point value: {e}", source=source) from None
        return cls(variables, polys, base)

    @classmethod
    def loads(cls, text, source=None):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, e.lineno, e.colno, source) from None
        return cls.from_json(data, source)
