"""Parser for the line-oriented ``key = value`` config grammar.

A file is a sequence of sections::

    # comment
    [material "silver"]
    omega_p = 1.402e16

    [sweep]
    geometry = otto

Section headers are either a bare word or a word followed by a quoted name.
Errors carry the 1-based line number.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ConfigError

_HEADER = re.compile(r'^\[\s*([A-Za-z_][\w-]*)\s*(?:"([^"]*)")?\s*\]$')
_ENTRY = re.compile(r"^([A-Za-z_][\w-]*)\s*=\s*(.*?)\s*$")


@dataclass
class Section:
    kind: str
    name: str | None
    line: int
    values: dict[str, str] = field(default_factory=dict)
    lines: dict[str, int] = field(default_factory=dict)

    def get_float(self, key, default=None):
        if key not in self.values:
            if default is None:
                raise ConfigError(f"missing key {key!r} in [{self.kind}]", self.line)
            return default
        try:
            return float(self.values[key])
        except ValueError:
            raise ConfigError(f"{key}: not a number: {self.values[key]!r}", self.lines[key]) from None

    def get_int(self, key, default=None):
        if key not in self.values:
            if default is None:
                raise ConfigError(f"missing key {key!r} in [{self.kind}]", self.line)
            return default
        try:
            return int(self.values[key])
        except ValueError:
            raise ConfigError(f"{key}: not an integer: {self.values[key]!r}", self.lines[key]) from None

    def get_str(self, key, default=None):
        return self.values.get(key, default)


def parse_config(text: str) -> list[Section]:
    sections: list[Section] = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("["):
            m = _HEADER.match(line)
            if m is None:
                raise ConfigError(f"malformed section header: {line!r}", lineno)
            current = Section(m.group(1), m.group(2), lineno)
            sections.append(current)
            continue
        m = _ENTRY.match(line)
        if m is None:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        if current is None:
            raise ConfigError("entry outside of any section", lineno)
        key, value = m.group(1), m.group(2)
        if key in current.values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        current.values[key] = value
        current.lines[key] = lineno
    return sections


def read_config(path) -> list[Section]:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
