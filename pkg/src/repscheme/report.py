"""Run reports: deterministic JSON plus an optional markdown rendering."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from . import __version__


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunReport:
    command: str
    inputs: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    seed: int | None = None
    timing: dict | None = None
    version: str = __version__

    def add_input(self, path):
        self.inputs.append({"path": str(path), "sha256": file_digest(path)})

    def to_json(self):
        out = {"command": self.command, "inputs": self.inputs, "results": self.results,
               "seed": self.seed, "version": self.version}
        if self.timing is not None:
            out["timing"] = self.timing
        return out

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text):
        d = json.loads(text)
        return cls(d["command"], d.get("inputs", []), d.get("results", {}), d.get("seed"),
                   d.get("timing"), d.get("version", __version__))

    def markdown(self):
        lines = [f"# repscheme {self.command}", ""]
        for item in self.inputs:
            lines.append(f"- input `{item['path']}` (sha256 `{item['sha256'][:12]}`)")
        if self.inputs:
            lines.append("")
        _render(self.results, lines, 0)
        return "\n".join(lines).rstrip() + "\n"


def _scalar(x):
    if isinstance(x, bool):
        return "yes" if x else "no"
    return str(x)


def _render(obj, lines, depth):
    pad = "  " * depth
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _is_flat_list(v):
                lines.append(f"{pad}- **{k}**:")
                _render(v, lines, depth + 1)
            else:
                lines.append(f"{pad}- **{k}**: {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _is_flat_list(v):
                lines.append(f"{pad}-")
                _render(v, lines, depth + 1)
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(f"{pad}{_scalar(obj)}")


def _is_flat_list(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) or
                                       (isinstance(x, list) and all(not isinstance(y, (dict, list))
                                                                    for y in x)) for x in v)


def _inline(v):
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{}"
    if isinstance(v, str) and "\n" in v:
        return "`" + v.strip().replace("\n", "; ") + "`"
    return _scalar(v)
