"""Shipped example groups, representation points and polynomial systems."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import ParseError
from .polynomials import PolynomialSystem
from .presentations import (build_coxeter, build_extended_coxeter, parse_graph,
                            parse_presentation)
from .rep_scheme import representation_from_json

FINITE_GROUPS = ("Z2", "Z3", "Z4", "Z2xZ2", "I2(4)", "Q8")
SYSTEMS = ("empty", "t", "t2", "t3", "circle", "t_uv")


@dataclass
class Instance:
    name: str
    group: str
    faithful: bool
    rho: object

    @property
    def presentation(self):
        return self.rho.presentation


def _data(*parts):
    return resources.files("repscheme").joinpath("/".join(("data",) + parts))


def parse_instance(data, source=None):
    """Build the presentation and validated representation described by an instance dict."""
    if "presentation" in data:
        pres = parse_presentation(data["presentation"], source)
    elif "graph" in data:
        graph = parse_graph(data["graph"], source)
        pres = build_extended_coxeter(graph)[0] if data.get("extended") else build_coxeter(graph)
    else:
        raise ParseError("instance needs a 'presentation' or a 'graph'", source=source)
    rho = representation_from_json(pres, data, source)
    return Instance(data.get("name", source or "instance"), data.get("group", ""),
                    bool(data.get("faithful", False)), rho)


def load_instance_file(path):
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}", source=str(path)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno, str(path)) from None
    return parse_instance(data, str(path))


def instance_names():
    return sorted(p.name[:-5] for p in _data("instances").iterdir() if p.name.endswith(".json"))


def load_instance(name):
    data = json.loads(_data("instances", f"{name}.json").read_text(encoding="utf-8"))
    return parse_instance(data, name)


def finite_instances():
    return [inst for inst in map(load_instance, instance_names()) if inst.group in FINITE_GROUPS]


def load_system(name):
    return PolynomialSystem.loads(_data("systems", f"{name}.json").read_text(encoding="utf-8"),
                                  name)


def data_path(*parts):
    """Filesystem path of a shipped data file (for the CLI and examples)."""
    return str(_data(*parts))
