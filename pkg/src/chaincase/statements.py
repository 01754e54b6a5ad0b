"""Closed statement vocabulary for case claims.

Claims are predicate applications over opaque string constants, optionally
negated. Keeping the predicate set closed (no free-text propositions)
makes contrariness decidable: a statement and its negation are contraries,
nothing else is.

Two constant conventions extend expressiveness without opening the
vocabulary:

* ``inputs(<txid>)`` denotes the set of resolved input addresses of a
  transaction, used by conclusions of the form "controls all input
  addresses of T";
* a statement may be quoted inside another statement's argument slot via
  its canonical rendering, used by sign_of/explains/position_to_know whose
  second-order arguments talk about claims.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class Predicate(str, Enum):
    CONTROLS = "controls"                     # (entity, address)
    LINKED = "linked"                         # (address, address)
    CONNECTED = "connected"                   # (entity-or-address, offence)
    IS_CHANGE = "is_change"                   # (txid, vout)
    RELIABLE = "reliable"                     # (source)
    POSITION_TO_KNOW = "position_to_know"     # (source, topic)
    SIGN_OF = "sign_of"                       # (observation, proposition)
    EXPLAINS = "explains"                     # (hypothesis, findings)
    HAS_MULTIPLE_INPUTS = "has_multiple_inputs"    # (txid)
    HAS_MULTIPLE_OUTPUTS = "has_multiple_outputs"  # (txid)


ARITY: dict[Predicate, int] = {
    Predicate.CONTROLS: 2,
    Predicate.LINKED: 2,
    Predicate.CONNECTED: 2,
    Predicate.IS_CHANGE: 2,
    Predicate.RELIABLE: 1,
    Predicate.POSITION_TO_KNOW: 2,
    Predicate.SIGN_OF: 2,
    Predicate.EXPLAINS: 2,
    Predicate.HAS_MULTIPLE_INPUTS: 1,
    Predicate.HAS_MULTIPLE_OUTPUTS: 1,
}

_INPUTS_RE = re.compile(r"^inputs\((?P<txid>.+)\)$")


class StatementError(ValueError):
    """Raised for unknown predicates or arity mismatches."""


@dataclass(frozen=True)
class Statement:
    predicate: Predicate
    args: tuple[str, ...]
    negated: bool = False

    def __post_init__(self):
        predicate = self.predicate
        if not isinstance(predicate, Predicate):
            try:
                predicate = Predicate(predicate)
            except ValueError:
                raise StatementError(f"unknown predicate {self.predicate!r}") from None
            object.__setattr__(self, "predicate", predicate)
        object.__setattr__(self, "args", tuple(str(a) for a in self.args))
        if len(self.args) != ARITY[predicate]:
            raise StatementError(
                f"{predicate.value} expects {ARITY[predicate]} argument(s), "
                f"got {len(self.args)}"
            )

    def negate(self) -> "Statement":
        return Statement(self.predicate, self.args, not self.negated)

    def is_contrary_of(self, other: "Statement") -> bool:
        return (self.predicate == other.predicate
                and self.args == other.args
                and self.negated != other.negated)

    def render(self) -> str:
        """Canonical text form; also the quoting convention for nesting."""
        body = f"{self.predicate.value}({', '.join(self.args)})"
        return f"not {body}" if self.negated else body

    def __str__(self) -> str:
        return self.render()

    def to_json_obj(self) -> dict:
        return {"predicate": self.predicate.value, "args": list(self.args),
                "negated": self.negated}

    @staticmethod
    def from_json_obj(obj: dict) -> "Statement":
        return Statement(Predicate(obj["predicate"]), tuple(obj["args"]),
                         bool(obj.get("negated", False)))


def inputs_constant(txid: str) -> str:
    """The composite constant standing for all input addresses of a tx."""
    return f"inputs({txid})"


def parse_inputs_constant(constant: str) -> str | None:
    """Return the txid when the constant is an inputs(...) composite."""
    match = _INPUTS_RE.match(constant)
    return match.group("txid") if match else None


def quote(statement: Statement) -> str:
    """Quote a statement for use inside another statement's argument slot."""
    return statement.render()
