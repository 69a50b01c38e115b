"""Finitely presented groups, labeled Coxeter graphs and constructions on them."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Word:
    """A word in named generators: a tuple of ``(name, +1 | -1)`` letters."""

    letters: tuple = ()

    def __post_init__(self):
        letters = tuple((str(g), int(e)) for g, e in self.letters)
        for g, e in letters:
            if e not in (1, -1):
                raise ValueError(f"letter exponent must be +1 or -1, got {e} on {g}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def gen(cls, name, power=1):
        e = 1 if power > 0 else -1
        return cls(((name, e),) * abs(power))

    @classmethod
    def of(cls, *items):
        """Build from names and ``(name, power)`` pairs: ``Word.of("a", ("b", -1))``."""
        out = []
        for it in items:
            if isinstance(it, Word):
                out.extend(it.letters)
            elif isinstance(it, str):
                out.append((it, 1))
            else:
                name, power = it
                out.extend(Word.gen(name, power).letters)
        return cls(tuple(out))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other):
        return Word(self.letters + other.letters)

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n)

    def inverse(self):
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def reduce(self):
        """Free reduction (cancel adjacent x x^-1 pairs)."""
        out = []
        for g, e in self.letters:
            if out and out[-1][0] == g and out[-1][1] == -e:
                out.pop()
            else:
                out.append((g, e))
        return Word(tuple(out))

    def is_reduced(self):
        return all(not (a[0] == b[0] and a[1] == -b[1])
                   for a, b in zip(self.letters, self.letters[1:]))

    def generators(self):
        seen = []
        for g, _ in self.letters:
            if g not in seen:
                seen.append(g)
        return seen

    def substitute(self, images):
        """Replace each generator by a word (missing names are kept)."""
        out = []
        for g, e in self.letters:
            img = images.get(g)
            if img is None:
                out.append((g, e))
            else:
                out.extend(img.letters if e == 1 else img.inverse().letters)
        return Word(tuple(out))

    def __str__(self):
        if not self.letters:
            return "1"
        return "*".join(g if e == 1 else f"{g}^-1" for g, e in self.letters)

    def __repr__(self):
        return f"Word({str(self)!r})"

    @classmethod
    def parse(cls, text, line=None, col_offset=0):
        return parse_word(text, line, col_offset)


def alternating(v, w, m):
    """The alternating product v w v w ... with m letters."""
    return Word(tuple(((v, 1) if k % 2 == 0 else (w, 1)) for k in range(m)))


def commutator(a, b):
    return Word.of(a, b, (a, -1), (b, -1))


@dataclass(frozen=True)
class Presentation:
    generators: tuple
    relators: tuple = ()
    graph: "LabeledGraph | None" = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        rels = tuple(r if isinstance(r, Word) else Word(r) for r in self.relators)
        seen = set()
        for g in gens:
            if not _NAME.fullmatch(g):
                raise ValidationError(f"invalid generator name {g!r}", g)
            if g in seen:
                raise ValidationError(f"duplicate generator {g!r}", g)
            seen.add(g)
        for r in rels:
            for g, _ in r:
                if g not in seen:
                    raise ValidationError(f"relator {r} uses unknown generator {g!r}", str(r))
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", rels)

    @property
    def rank(self):
        return len(self.generators)

    def to_text(self):
        lines = [f"gen {g}" for g in self.generators]
        lines += [f"rel {r}" for r in self.relators]
        return "\n".join(lines) + "\n"

    def __str__(self):
        return "<" + ", ".join(self.generators) + " | " + ", ".join(
            str(r) for r in self.relators) + ">"


@dataclass(frozen=True)
class LabeledGraph:
    """Simplicial graph with even edge labels; vertex order is kept."""

    vertices: tuple
    edges: tuple = ()

    def __post_init__(self):
        verts = tuple(self.vertices)
        seen = set()
        for v in verts:
            if not _NAME.fullmatch(v):
                raise ValidationError(f"invalid vertex name {v!r}", v)
            if v in seen:
                raise ValidationError(f"duplicate vertex {v!r}", v)
            seen.add(v)
        edges = []
        pairs = set()
        for v, w, m in self.edges:
            m = int(m)
            if v not in seen or w not in seen:
                raise ValidationError(f"edge [{v},{w}] uses an unknown vertex", f"[{v},{w}]")
            if v == w:
                raise ValidationError(f"loop at vertex {v!r}", f"[{v},{w}]")
            key = frozenset((v, w))
            if key in pairs:
                raise ValidationError(f"multi-edge [{v},{w}]", f"[{v},{w}]")
            if m <= 0 or m % 2:
                raise ValidationError(
                    f"edge [{v},{w}] has label {m}; every label must be even and positive",
                    f"[{v},{w}]")
            pairs.add(key)
            edges.append((v, w, m))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def rank(self):
        return len(self.vertices)

    def label(self, v, w):
        for a, b, m in self.edges:
            if {a, b} == {v, w}:
                return m
        return None

    def neighbors(self, v):
        return [b if a == v else a for a, b, _ in self.edges if v in (a, b)]

    def subgraph(self, vertices):
        keep = [v for v in self.vertices if v in set(vertices)]
        ks = set(keep)
        return LabeledGraph(tuple(keep), tuple(e for e in self.edges if e[0] in ks and e[1] in ks))

    def to_text(self):
        lines = [f"vertex {v}" for v in self.vertices]
        lines += [f"edge {v} {w} {m}" for v, w, m in self.edges]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GroupHom:
    source: Presentation
    target: Presentation
    images: dict

    def __post_init__(self):
        missing = [g for g in self.source.generators if g not in self.images]
        if missing:
            raise ValidationError(f"homomorphism has no image for {missing}", missing[0])
        tg = set(self.target.generators)
        for g, w in self.images.items():
            for h, _ in w:
                if h not in tg:
                    raise ValidationError(f"image of {g} uses {h!r}, not a target generator", g)

    def apply(self, word):
        return word.substitute(self.images).reduce()

    def is_identity(self):
        return self.source == self.target and all(
            self.images[g] == Word.gen(g) for g in self.source.generators)

    def __hash__(self):
        return hash((self.source, self.target, tuple(sorted(
            (g, w) for g, w in self.images.items()))))


def fresh_name(base, taken):
    """``base`` if free, else ``_base1``, ``_base2``, ... (``_`` is the reserved prefix)."""
    if base not in taken:
        return base
    k = 1
    while f"_{base}{k}" in taken:
        k += 1
    return f"_{base}{k}"


def build_coxeter(graph):
    """Coxeter presentation: g^2 per vertex, alternating relator per edge."""
    rels = [Word.gen(v, 2) for v in graph.vertices]
    for v, w, m in graph.edges:
        rels.append(alternating(v, w, m) * alternating(w, v, m).inverse())
    return Presentation(graph.vertices, tuple(rels), graph=graph)


def build_extended_coxeter(graph):
    """Canonical central extension by Z2 = <z>; returns ``(presentation, projection)``."""
    z = fresh_name("z", set(graph.vertices))
    rels = [Word.gen(z, 2)]
    rels += [commutator(v, z) for v in graph.vertices]
    rels += [Word.of((v, 2), (z, -1)) for v in graph.vertices]
    for v, w, m in graph.edges:
        rels.append(alternating(v, w, m) * alternating(w, v, m).inverse()
                    * Word.gen(z, -(m + 1)))
    ext = Presentation((z,) + graph.vertices, tuple(rels), graph=graph)
    cox = build_coxeter(graph)
    images = {v: Word.gen(v) for v in graph.vertices}
    images[z] = Word()
    return ext, GroupHom(ext, cox, images)


def central_generator(pres):
    """Name of the central generator of an extended Coxeter presentation."""
    extra = [g for g in pres.generators if pres.graph is None or g not in pres.graph.vertices]
    if len(extra) != 1:
        raise ValidationError("presentation is not an extended Coxeter presentation")
    return extra[0]


def quotient_by_normal_closure(pres, theta, eliminate=True):
    """Kill the normal closure of ``theta``; returns ``(quotient, projection)``.

    Each theta word becomes a relator.  With ``eliminate`` set, a theta word that
    is a single generator letter instead removes that generator (substituting the
    identity, free-reducing and dropping trivial or repeated relators).
    """
    theta = [w if isinstance(w, Word) else parse_word(str(w)) for w in theta]
    for w in theta:
        for g, _ in w:
            if g not in pres.generators:
                raise ValidationError(f"theta word {w} uses unknown generator {g!r}", str(w))
    if not theta:
        return pres, GroupHom(pres, pres, {g: Word.gen(g) for g in pres.generators})
    killed = set()
    extra = []
    for w in theta:
        red = w.reduce()
        if eliminate and len(red) == 1:
            killed.add(red.letters[0][0])
        else:
            extra.append(w)
    gens = tuple(g for g in pres.generators if g not in killed)
    kill = {g: Word() for g in killed}
    rels = []
    for r in list(pres.relators) + extra:
        new = r.substitute(kill).reduce() if killed else r
        if len(new) and new not in rels:
            rels.append(new)
    quotient = Presentation(gens, tuple(rels))
    images = {g: (Word() if g in killed else Word.gen(g)) for g in pres.generators}
    return quotient, GroupHom(pres, quotient, images)


def free_product_with_free(pres, k):
    """``pres * F_k`` with fresh letters t1..tk; returns ``(presentation, retraction)``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    taken = set(pres.generators)
    letters = []
    for i in range(1, k + 1):
        name = fresh_name(f"t{i}", taken)
        taken.add(name)
        letters.append(name)
    big = Presentation(pres.generators + tuple(letters), pres.relators, graph=pres.graph)
    images = {g: Word.gen(g) for g in pres.generators}
    images.update({t: Word() for t in letters})
    return big, GroupHom(big, pres, images)


def free_letters(big, small):
    """Generators of ``big`` not present in ``small``."""
    return [g for g in big.generators if g not in small.generators]


# -- text formats -----------------------------------------------------------

_LETTER = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)(?:\s*\^\s*(-?\d+))?\s*")


def parse_word(text, line=None, col_offset=0):
    stripped = text.strip()
    if stripped in ("", "1"):
        return Word()
    letters = []
    pos = 0
    while True:
        m = _LETTER.match(text, pos)
        if not m or not m.group(1):
            raise ParseError(f"expected a generator name, found {text[pos:pos + 10]!r}",
                             line, col_offset + pos + 1)
        name = m.group(1)
        power = int(m.group(2)) if m.group(2) is not None else 1
        if power == 0:
            raise ParseError(f"zero exponent on {name}", line, col_offset + m.start(2) + 1)
        letters.extend(Word.gen(name, power).letters)
        pos = m.end()
        if pos >= len(text):
            break
        if text[pos] != "*":
            raise ParseError(f"expected '*' between letters, found {text[pos]!r}",
                             line, col_offset + pos + 1)
        pos += 1
    return Word(tuple(letters))


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if body.strip():
            yield lineno, body


def parse_presentation(text, source=None):
    """Parse ``gen <name>`` / ``rel <word>`` lines."""
    gens = []
    rels = []
    where = {}
    for lineno, body in _lines(text):
        m = re.match(r"\s*(\S+)\s*", body)
        kw = m.group(1)
        rest_col = m.end()
        rest = body[rest_col:]
        if kw == "gen":
            name = rest.strip()
            if not _NAME.fullmatch(name):
                raise ParseError(f"invalid generator name {name!r}", lineno, rest_col + 1, source)
            if name in gens:
                raise ParseError(f"duplicate generator {name!r}", lineno, rest_col + 1, source)
            gens.append(name)
        elif kw == "rel":
            try:
                w = parse_word(rest, lineno, rest_col)
            except ParseError as e:
                raise ParseError(e.message, e.line, e.column, source) from None
            rels.append(w)
            where[len(rels) - 1] = (lineno, rest_col + 1)
        else:
            raise ParseError(f"unknown directive {kw!r} (expected gen/rel)", lineno,
                             m.start(1) + 1, source)
    known = set(gens)
    for idx, w in enumerate(rels):
        for g, _ in w:
            if g not in known:
                lineno, col = where[idx]
                raise ParseError(f"relator uses undeclared generator {g!r}", lineno, col, source)
    return Presentation(tuple(gens), tuple(rels))


def parse_graph(text, source=None):
    """Parse ``vertex <name>`` / ``edge <v> <w> <even label>`` lines."""
    verts = []
    edges = []
    pairs = set()
    for lineno, body in _lines(text):
        toks = [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", body)]
        kw, col = toks[0]
        if kw == "vertex":
            if len(toks) != 2:
                raise ParseError("expected 'vertex <name>'", lineno, col, source)
            name, c = toks[1]
            if not _NAME.fullmatch(name):
                raise ParseError(f"invalid vertex name {name!r}", lineno, c, source)
            if name in verts:
                raise ParseError(f"duplicate vertex {name!r}", lineno, c, source)
            verts.append(name)
        elif kw == "edge":
            if len(toks) != 4:
                raise ParseError("expected 'edge <v> <w> <label>'", lineno, col, source)
            (v, cv), (w, cw), (lab, cl) = toks[1:]
            for name, c in ((v, cv), (w, cw)):
                if name not in verts:
                    raise ParseError(f"undeclared vertex {name!r}", lineno, c, source)
            if v == w:
                raise ParseError(f"loop at {v!r}", lineno, cv, source)
            if not re.fullmatch(r"\d+", lab):
                raise ParseError(f"label {lab!r} is not a positive integer", lineno, cl, source)
            m = int(lab)
            if m <= 0 or m % 2:
                raise ParseError(f"label {m} is not even", lineno, cl, source)
            key = frozenset((v, w))
            if key in pairs:
                raise ParseError(f"duplicate edge [{v},{w}]", lineno, cv, source)
            pairs.add(key)
            edges.append((v, w, m))
        else:
            raise ParseError(f"unknown directive {kw!r} (expected vertex/edge)", lineno, col,
                             source)
    return LabeledGraph(tuple(verts), tuple(edges))
