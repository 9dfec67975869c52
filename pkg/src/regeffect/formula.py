"""Model formulas of the form ``response ~ group + covariate + ...``.

The first right-hand term is always the two-level grouping variable; the
remaining terms are numeric covariates, kept in order.  Names containing
whitespace, ``~`` or ``+`` can be written in backticks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DuplicateTerm, FormulaSyntaxError

_PLAIN = re.compile(r"[^\s~+`]+")


@dataclass(frozen=True)
class ModelSpec:
    response: str
    group: str
    covariates: tuple[str, ...] = ()
    reference_level: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "covariates", tuple(self.covariates))
        names = [self.response, self.group, *self.covariates]
        if len(set(names)) != len(names):
            raise DuplicateTerm(f"formula names must be distinct: {names}")

    @property
    def k(self) -> int:
        return len(self.covariates)

    def with_reference(self, level: str | None) -> ModelSpec:
        return ModelSpec(self.response, self.group, self.covariates, level)


def _byte_offset(text: str, i: int) -> int:
    return len(text[:i].encode("utf-8"))


def _tokens(text: str):
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "~+":
            yield ch, ch, i
            i += 1
        elif ch == "`":
            end = text.find("`", i + 1)
            if end < 0:
                raise FormulaSyntaxError("unterminated backtick", _byte_offset(text, i))
            if end == i + 1:
                raise FormulaSyntaxError("empty name", _byte_offset(text, i))
            yield "name", text[i + 1:end], i
            i = end + 1
        else:
            match = _PLAIN.match(text, i)
            yield "name", match.group(), i
            i = match.end()
    yield "end", "", len(text)


def parse_formula(text: str) -> ModelSpec:
    """Parse ``RESPONSE ~ GROUP (+ COVARIATE)*``.

    >>> parse_formula("G3 ~ address + traveltime + failures").covariates
    ('traveltime', 'failures')
    """
    toks = list(_tokens(text))
    pos = 0

    def expect(kind: str, what: str) -> str:
        nonlocal pos
        tk, val, at = toks[pos]
        if tk != kind:
            found = "end of input" if tk == "end" else repr(val)
            raise FormulaSyntaxError(f"expected {what}, found {found}", _byte_offset(text, at))
        pos += 1
        return val

    response = expect("name", "response name")
    expect("~", "'~'")
    terms = [(expect("name", "group variable name"), toks[pos - 1][2])]
    while toks[pos][0] == "+":
        pos += 1
        terms.append((expect("name", "covariate name"), toks[pos - 1][2]))
    expect("end", "'+' or end of formula")

    seen = {response}
    for name, at in terms:
        if name in seen:
            raise DuplicateTerm(f"duplicate term {name!r} at offset {_byte_offset(text, at)}")
        seen.add(name)
    return ModelSpec(response, terms[0][0], tuple(name for name, _ in terms[1:]))


def _render_name(name: str) -> str:
    return name if _PLAIN.fullmatch(name) else f"`{name}`"


def render_formula(spec: ModelSpec) -> str:
    """Canonical text for ``spec``; ``parse_formula`` inverts it."""
    rhs = " + ".join(_render_name(n) for n in (spec.group, *spec.covariates))
    return f"{_render_name(spec.response)} ~ {rhs}"
