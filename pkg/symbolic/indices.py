"""Spacetime and inner-space index labels"""
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable

from symbolic.errors import UnknownIndexError


class IndexKind(str, Enum):
    SPACETIME = "spacetime"
    INNER = "inner"


SPACETIME_NAMES = frozenset({"mu", "nu", "rho", "si", "ta", "la", "ka", "ph", "ch"})
INNER_NAMES = frozenset({"al", "be", "ga", "de", "ep", "ze", "et", "th", "io", "om"})

_SPACETIME_DUMMY = re.compile(r"s\d+$")
_INNER_DUMMY = re.compile(r"i\d+$")


def index_kind(label: str) -> IndexKind:
    """Infer the index family from a grammar label"""
    if label in SPACETIME_NAMES or _SPACETIME_DUMMY.match(label):
        return IndexKind.SPACETIME
    if label in INNER_NAMES or _INNER_DUMMY.match(label):
        return IndexKind.INNER
    raise UnknownIndexError(f"Unknown index label: {label}")


@dataclass(frozen=True, order=True)
class Index:
    kind: IndexKind
    label: str
    # η is implicit, so variance never takes part in equality
    lower: bool = field(default=False, compare=False)

    @classmethod
    def parse(cls, token: str) -> "Index":
        lower = token.startswith(".")
        label = token[1:] if lower else token
        return cls(index_kind(label), label, lower)

    @classmethod
    def spacetime(cls, label: str, lower: bool = False) -> "Index":
        return cls(IndexKind.SPACETIME, label, lower)

    @classmethod
    def inner(cls, label: str, lower: bool = False) -> "Index":
        return cls(IndexKind.INNER, label, lower)

    def with_label(self, label: str) -> "Index":
        return replace(self, label=label)

    def lowered(self) -> "Index":
        return replace(self, lower=True)

    def raised(self) -> "Index":
        return replace(self, lower=False)

    def __str__(self):
        return ("." if self.lower else "") + self.label


def fresh_label(kind: IndexKind, avoid: Iterable[str]) -> str:
    """Smallest numbered dummy label of the given family not in avoid"""
    taken = set(avoid)
    prefix = "s" if kind == IndexKind.SPACETIME else "i"
    n = 1
    while f"{prefix}{n}" in taken:
        n += 1
    return f"{prefix}{n}"
