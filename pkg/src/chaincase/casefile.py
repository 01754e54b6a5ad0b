"""Case files: the persistent unit of an investigation.

A case bundles a transaction chain (embedded or referenced by path),
entities, offences, evidence items, instantiated arguments with their
critical-question state, the append-only answer history, and display-only
attribution tags. Serialization is deterministic JSON (sorted keys, no
timestamps), so identical case states produce identical bytes.

Loading validates referential integrity: every id unique, every reference
resolvable, every argument's premises reproducible by substituting its
bindings into its scheme's templates, and the premise-support graph
acyclic.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Mapping

from chaincase import afcore
from chaincase.chain import TransactionSet, parse_chain_file
from chaincase.records import AttributionTag, CQAnswerRecord, Entity, EvidenceItem, Offence
from chaincase.schemes import (
    Argument,
    CQState,
    CQStatus,
    Support,
    SupportKind,
    check_bindings,
    get_scheme,
    instantiate_statement,
    statement_supports,
)
from chaincase.statements import Statement

FORMAT_VERSION = "1"


class CaseError(Exception):
    """Base class for case-file errors."""


class CaseFormatError(CaseError):
    """The on-disk document is malformed or has an unsupported version."""


class ReferentialIntegrityError(CaseError):
    """A stored reference points at a missing or inconsistent record."""


class UnknownIdError(CaseError, LookupError):
    """A lookup by id found nothing."""


@dataclass(frozen=True)
class Evaluation:
    """Result of compiling and labelling a case, memoized per revision."""

    framework: afcore.ArgumentationFramework
    labelling: Mapping[str, str]
    statement_statuses: Mapping[str, str]
    revision: int
    open_assumptions_attack: bool


class CaseFile:
    def __init__(self, case_id: str, *, chain_embedded: dict | None = None,
                 chain_path: str | None = None, base_dir: str | None = None):
        if not case_id or not isinstance(case_id, str):
            raise CaseFormatError("case_id must be a non-empty string")
        if (chain_embedded is None) == (chain_path is None):
            raise CaseFormatError(
                "exactly one of an embedded chain or a chain path is required"
            )
        self.case_id = case_id
        self.chain_embedded = chain_embedded
        self.chain_path = chain_path
        self.base_dir = base_dir
        self.entities: list[Entity] = []
        self.offences: list[Offence] = []
        self.evidence: list[EvidenceItem] = []
        self.arguments: list[Argument] = []
        self.cq_answers: list[CQAnswerRecord] = []
        self.attribution_tags: list[AttributionTag] = []
        self.revision = 0
        self._chain_cache: TransactionSet | None = None
        self._eval_cache: dict[tuple[int, bool], Evaluation] = {}

    # -- chain ------------------------------------------------------------

    def chain_set(self) -> TransactionSet:
        if self._chain_cache is None:
            if self.chain_embedded is not None:
                raw = json.dumps(self.chain_embedded)
            else:
                path = self.chain_path
                if self.base_dir is not None and not os.path.isabs(path):
                    path = os.path.join(self.base_dir, path)
                with open(path, "rb") as handle:
                    raw = handle.read()
            self._chain_cache = parse_chain_file(raw)
        return self._chain_cache

    # -- mutation helpers ---------------------------------------------------

    def bump_revision(self) -> None:
        self.revision += 1

    def allocate_arg_id(self) -> str:
        taken = {arg.arg_id for arg in self.arguments}
        n = len(self.arguments) + 1
        while f"a{n}" in taken:
            n += 1
        return f"a{n}"

    def record_cq_answer(self, arg_id: str, cq_id: str, answer: str,
                         justification: str) -> CQAnswerRecord:
        record = CQAnswerRecord(len(self.cq_answers) + 1, arg_id, cq_id,
                                answer, justification)
        self.cq_answers.append(record)
        return record

    def add_entity(self, entity: Entity) -> Entity:
        if any(e.entity_id == entity.entity_id for e in self.entities):
            raise ReferentialIntegrityError(f"duplicate entity id {entity.entity_id!r}")
        self.entities.append(entity)
        self.bump_revision()
        return entity

    def add_offence(self, offence: Offence) -> Offence:
        if any(o.offence_id == offence.offence_id for o in self.offences):
            raise ReferentialIntegrityError(f"duplicate offence id {offence.offence_id!r}")
        self.offences.append(offence)
        self.bump_revision()
        return offence

    def add_evidence(self, item: EvidenceItem) -> EvidenceItem:
        if any(e.evidence_id == item.evidence_id for e in self.evidence):
            raise ReferentialIntegrityError(f"duplicate evidence id {item.evidence_id!r}")
        self.evidence.append(item)
        self.bump_revision()
        return item

    def add_attribution_tag(self, tag: AttributionTag) -> AttributionTag:
        if not any(e.entity_id == tag.entity_id for e in self.entities):
            raise ReferentialIntegrityError(
                f"attribution tag references unknown entity {tag.entity_id!r}"
            )
        self.attribution_tags.append(tag)
        self.bump_revision()
        return tag

    # -- lookups ------------------------------------------------------------

    def entity(self, entity_id: str) -> Entity:
        for e in self.entities:
            if e.entity_id == entity_id:
                return e
        raise UnknownIdError(f"unknown entity {entity_id!r}")

    def evidence_item(self, evidence_id: str) -> EvidenceItem:
        for e in self.evidence:
            if e.evidence_id == evidence_id:
                return e
        raise UnknownIdError(f"unknown evidence {evidence_id!r}")

    def argument(self, arg_id: str) -> Argument:
        for a in self.arguments:
            if a.arg_id == arg_id:
                return a
        raise UnknownIdError(f"unknown argument {arg_id!r}")

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, open_assumptions_attack: bool = True) -> Evaluation:
        key = (self.revision, open_assumptions_attack)
        cached = self._eval_cache.get(key)
        if cached is not None:
            return cached
        framework = afcore.build_framework(
            self, open_assumptions_attack=open_assumptions_attack)
        labelling = afcore.grounded_labelling(framework)
        statuses: dict[str, str] = {}
        for arg in self.arguments:
            rendered = arg.conclusion.render()
            if rendered not in statuses:
                statuses[rendered] = afcore.statement_status(
                    self.arguments, labelling, arg.conclusion)
        evaluation = Evaluation(framework, labelling, statuses,
                                self.revision, open_assumptions_attack)
        self._eval_cache.clear()
        self._eval_cache[key] = evaluation
        return evaluation

    # -- serialization ---------------------------------------------------------

    def to_json_obj(self) -> dict:
        chain = ({"embedded": self.chain_embedded}
                 if self.chain_embedded is not None else {"path": self.chain_path})
        return {
            "format_version": FORMAT_VERSION,
            "case_id": self.case_id,
            "chain": chain,
            "entities": [
                {"entity_id": e.entity_id, "label": e.label, "kind": e.kind}
                for e in self.entities
            ],
            "offences": [
                {"offence_id": o.offence_id, "label": o.label}
                for o in self.offences
            ],
            "evidence": [
                {
                    "evidence_id": e.evidence_id,
                    "statement": e.statement.to_json_obj(),
                    "source": e.source,
                    "obtained_via": e.obtained_via,
                }
                for e in self.evidence
            ],
            "arguments": [_argument_to_json(a) for a in self.arguments],
            "cq_answers": [
                {
                    "seq": r.seq,
                    "arg_id": r.arg_id,
                    "cq_id": r.cq_id,
                    "answer": r.answer,
                    "justification": r.justification,
                }
                for r in self.cq_answers
            ],
            "attribution_tags": [
                {
                    "addresses": list(t.addresses),
                    "entity_id": t.entity_id,
                    "source": t.source,
                }
                for t in self.attribution_tags
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True) + "\n"


def _argument_to_json(arg: Argument) -> dict:
    bindings = {}
    for var, value in arg.bindings.items():
        if isinstance(value, Statement):
            bindings[var] = {"kind": "statement", "value": value.to_json_obj()}
        else:
            bindings[var] = {"kind": "text", "value": value}
    return {
        "arg_id": arg.arg_id,
        "scheme_id": arg.scheme_id,
        "bindings": bindings,
        "premises": [p.to_json_obj() for p in arg.premises],
        "conclusion": arg.conclusion.to_json_obj(),
        "premise_support": [
            {"kind": s.kind.value, "ref": s.ref} for s in arg.premise_support
        ],
        "cq_state": {
            cq_id: {"state": status.state.value, "justification": status.justification}
            for cq_id, status in sorted(arg.cq_state.items())
        },
    }


def _require(obj: dict, keys: set[str], what: str) -> None:
    if not isinstance(obj, dict):
        raise CaseFormatError(f"{what} must be an object")
    missing = keys - set(obj)
    extra = set(obj) - keys
    if missing:
        raise CaseFormatError(f"{what} is missing field(s) {sorted(missing)}")
    if extra:
        raise CaseFormatError(f"{what} has unexpected field(s) {sorted(extra)}")


def _argument_from_json(obj: dict) -> Argument:
    _require(obj, {"arg_id", "scheme_id", "bindings", "premises", "conclusion",
                   "premise_support", "cq_state"}, "argument")
    scheme = get_scheme(obj["scheme_id"])
    bindings: dict = {}
    for var, entry in obj["bindings"].items():
        _require(entry, {"kind", "value"}, f"binding {var!r}")
        if entry["kind"] == "statement":
            bindings[var] = Statement.from_json_obj(entry["value"])
        elif entry["kind"] == "text":
            bindings[var] = entry["value"]
        else:
            raise CaseFormatError(f"binding {var!r} has unknown kind {entry['kind']!r}")
    premises = tuple(Statement.from_json_obj(p) for p in obj["premises"])
    conclusion = Statement.from_json_obj(obj["conclusion"])
    supports = []
    for entry in obj["premise_support"]:
        _require(entry, {"kind", "ref"}, "premise support entry")
        try:
            kind = SupportKind(entry["kind"])
        except ValueError:
            raise CaseFormatError(
                f"unknown support kind {entry['kind']!r}") from None
        supports.append(Support(kind, entry["ref"]))
    cq_state = {}
    for cq_id, entry in obj["cq_state"].items():
        _require(entry, {"state", "justification"}, f"cq state {cq_id!r}")
        scheme.cq(cq_id)
        try:
            state = CQState(entry["state"])
        except ValueError:
            raise CaseFormatError(f"unknown cq state {entry['state']!r}") from None
        cq_state[cq_id] = CQStatus(state, entry["justification"])
    return Argument(
        arg_id=obj["arg_id"],
        scheme_id=obj["scheme_id"],
        bindings=bindings,
        premises=premises,
        conclusion=conclusion,
        premise_support=tuple(supports),
        cq_state=cq_state,
    )


def _verify_argument(case: CaseFile, arg: Argument, ts: TransactionSet) -> None:
    scheme = get_scheme(arg.scheme_id)
    check_bindings(scheme, arg.bindings)
    expected = tuple(instantiate_statement(p.statement, arg.bindings)
                     for p in scheme.premises)
    if expected != arg.premises:
        raise CaseFormatError(
            f"argument {arg.arg_id!r}: stored premises do not match the "
            f"scheme template under its bindings"
        )
    if instantiate_statement(scheme.conclusion, arg.bindings) != arg.conclusion:
        raise CaseFormatError(
            f"argument {arg.arg_id!r}: stored conclusion does not match the "
            f"scheme template under its bindings"
        )
    if len(arg.premise_support) != len(arg.premises):
        raise CaseFormatError(
            f"argument {arg.arg_id!r}: expected {len(arg.premises)} premise "
            f"support entries, found {len(arg.premise_support)}"
        )
    for premise, support in zip(arg.premises, arg.premise_support):
        if support.kind is SupportKind.EVIDENCE:
            try:
                item = case.evidence_item(support.ref)
            except UnknownIdError:
                raise ReferentialIntegrityError(
                    f"argument {arg.arg_id!r} cites unknown evidence {support.ref!r}"
                ) from None
            known = item.statement
        else:
            try:
                cited = case.argument(support.ref)
            except UnknownIdError:
                raise ReferentialIntegrityError(
                    f"argument {arg.arg_id!r} cites unknown argument {support.ref!r}"
                ) from None
            known = cited.conclusion
        if not statement_supports(known, premise, ts):
            raise ReferentialIntegrityError(
                f"argument {arg.arg_id!r}: support {support.ref!r} does not "
                f"establish premise {premise.render()!r}"
            )


def _verify_support_acyclic(case: CaseFile) -> None:
    edges: dict[str, list[str]] = {}
    for arg in case.arguments:
        edges[arg.arg_id] = [s.ref for s in arg.premise_support
                             if s.kind is SupportKind.ARGUMENT]
    state: dict[str, int] = {}

    def visit(node: str, trail: list[str]) -> None:
        mark = state.get(node, 0)
        if mark == 1:
            cycle = trail[trail.index(node):] + [node]
            raise ReferentialIntegrityError(
                "premise support must be acyclic; found cycle "
                + " -> ".join(cycle)
            )
        if mark == 2:
            return
        state[node] = 1
        for nxt in edges.get(node, ()):
            visit(nxt, trail + [node])
        state[node] = 2

    for arg_id in edges:
        visit(arg_id, [])


def verify_case(case: CaseFile) -> None:
    """Full integrity check; raises on the first violation found."""
    for items, key, what in (
        (case.entities, lambda e: e.entity_id, "entity"),
        (case.offences, lambda o: o.offence_id, "offence"),
        (case.evidence, lambda e: e.evidence_id, "evidence"),
        (case.arguments, lambda a: a.arg_id, "argument"),
    ):
        seen: set[str] = set()
        for item in items:
            item_id = key(item)
            if item_id in seen:
                raise ReferentialIntegrityError(f"duplicate {what} id {item_id!r}")
            seen.add(item_id)
    for tag in case.attribution_tags:
        if not any(e.entity_id == tag.entity_id for e in case.entities):
            raise ReferentialIntegrityError(
                f"attribution tag references unknown entity {tag.entity_id!r}"
            )
    arg_ids = {a.arg_id for a in case.arguments}
    for record in case.cq_answers:
        if record.arg_id not in arg_ids:
            raise ReferentialIntegrityError(
                f"cq answer #{record.seq} references unknown argument {record.arg_id!r}"
            )
        get_scheme(case.argument(record.arg_id).scheme_id).cq(record.cq_id)
    ts = case.chain_set()
    for arg in case.arguments:
        _verify_argument(case, arg, ts)
    _verify_support_acyclic(case)


def case_from_json_obj(obj: dict, base_dir: str | None = None) -> CaseFile:
    _require(obj, {"format_version", "case_id", "chain", "entities", "offences",
                   "evidence", "arguments", "cq_answers", "attribution_tags"},
             "case file")
    if obj["format_version"] != FORMAT_VERSION:
        raise CaseFormatError(
            f"unsupported format_version {obj['format_version']!r}; "
            f"this build reads version {FORMAT_VERSION!r}"
        )
    chain = obj["chain"]
    if not isinstance(chain, dict) or set(chain) not in ({"embedded"}, {"path"}):
        raise CaseFormatError("chain must carry exactly one of 'embedded' or 'path'")
    case = CaseFile(
        obj["case_id"],
        chain_embedded=chain.get("embedded"),
        chain_path=chain.get("path"),
        base_dir=base_dir,
    )
    for entry in obj["entities"]:
        _require(entry, {"entity_id", "label", "kind"}, "entity")
        try:
            case.entities.append(Entity(entry["entity_id"], entry["label"], entry["kind"]))
        except ValueError as exc:
            raise CaseFormatError(str(exc)) from None
    for entry in obj["offences"]:
        _require(entry, {"offence_id", "label"}, "offence")
        case.offences.append(Offence(entry["offence_id"], entry["label"]))
    for entry in obj["evidence"]:
        _require(entry, {"evidence_id", "statement", "source", "obtained_via"},
                 "evidence item")
        case.evidence.append(EvidenceItem(
            entry["evidence_id"],
            Statement.from_json_obj(entry["statement"]),
            entry["source"],
            entry["obtained_via"],
        ))
    for entry in obj["arguments"]:
        case.arguments.append(_argument_from_json(entry))
    expected_seq = 1
    for entry in obj["cq_answers"]:
        _require(entry, {"seq", "arg_id", "cq_id", "answer", "justification"},
                 "cq answer")
        if entry["seq"] != expected_seq:
            raise CaseFormatError(
                f"cq answer history must be contiguous from 1; "
                f"expected seq {expected_seq}, found {entry['seq']!r}"
            )
        expected_seq += 1
        case.cq_answers.append(CQAnswerRecord(
            entry["seq"], entry["arg_id"], entry["cq_id"],
            entry["answer"], entry["justification"],
        ))
    for entry in obj["attribution_tags"]:
        _require(entry, {"addresses", "entity_id", "source"}, "attribution tag")
        case.attribution_tags.append(AttributionTag(
            tuple(entry["addresses"]), entry["entity_id"], entry["source"],
        ))
    verify_case(case)
    return case


def load_case(path: str) -> CaseFile:
    with open(path, "rb") as handle:
        try:
            obj = json.load(handle)
        except json.JSONDecodeError as exc:
            raise CaseFormatError(f"case file is not valid JSON: {exc}") from None
    return case_from_json_obj(obj, base_dir=os.path.dirname(os.path.abspath(path)))


def save_case(case: CaseFile, path: str) -> None:
    verify_case(case)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(case.to_json())


def new_case(case_id: str, *, chain_embedded: dict | None = None,
             chain_path: str | None = None, base_dir: str | None = None) -> CaseFile:
    """Create an empty case and eagerly parse its chain (fail fast)."""
    case = CaseFile(case_id, chain_embedded=chain_embedded,
                    chain_path=chain_path, base_dir=base_dir)
    case.chain_set()
    return case
