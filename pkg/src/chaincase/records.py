"""Plain record types stored in a case file.

Kept separate from the case container so the scheme engine can create
evidence items without importing the container module.
"""

from __future__ import annotations

from dataclasses import dataclass

from chaincase.statements import Statement

ENTITY_KINDS = ("person", "service", "marketplace", "software")


@dataclass(frozen=True)
class Entity:
    entity_id: str
    label: str
    kind: str

    def __post_init__(self):
        if self.kind not in ENTITY_KINDS:
            raise ValueError(
                f"entity kind must be one of {ENTITY_KINDS}, got {self.kind!r}"
            )


@dataclass(frozen=True)
class Offence:
    offence_id: str
    label: str


@dataclass(frozen=True)
class EvidenceItem:
    """An externally sourced (or chain-verified) statement with provenance."""

    evidence_id: str
    statement: Statement
    source: str
    obtained_via: str


@dataclass(frozen=True)
class AttributionTag:
    """Display-only address attribution; never used for inference."""

    addresses: tuple[str, ...]
    entity_id: str
    source: str


@dataclass(frozen=True)
class CQAnswerRecord:
    """One entry in the append-only critical-question answer history."""

    seq: int
    arg_id: str
    cq_id: str
    answer: str
    justification: str
