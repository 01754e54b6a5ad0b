"""Argumentation schemes, critical questions, and argument instantiation.

The catalog holds seven schemes: four tailored to blockchain tracing
(suspicion through address control, cluster from software, cluster from
multi-input, cluster by change-address) and three general-purpose ones
(position to know, sign, abductive inference). Each scheme carries premise
and conclusion templates over the closed statement vocabulary plus its
critical questions.

Critical questions come in three kinds:

* ``assumption``: the proponent owes an answer; an unanswered or
  unfavourable answer undermines the argument,
* ``exception``: presumed fine unless answered unfavourably,
* ``supportive``: prompts for further corroboration; never attacks, but an
  open one blocks the "corroborated" report tier.

Instantiating a scheme grounds every premise in either an evidence item or
the conclusion of an existing argument (keeping the support graph acyclic
by construction), so arguments always expose a complete, auditable chain.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from chaincase.chain import TransactionSet
from chaincase.heuristics import HeuristicParams, detect_change_output, detect_coinjoin
from chaincase.records import EvidenceItem
from chaincase.statements import (
    Predicate,
    Statement,
    inputs_constant,
    parse_inputs_constant,
    quote,
)


class SchemeError(Exception):
    """Base class for scheme-engine errors."""


class UnknownSchemeError(SchemeError, LookupError):
    pass


class BindingError(SchemeError):
    """A binding is missing, superfluous, or of the wrong type."""


class GroundingError(SchemeError):
    """A premise cannot be supported by the case's evidence or arguments."""


class CQKind(str, Enum):
    ASSUMPTION = "assumption"
    EXCEPTION = "exception"
    SUPPORTIVE = "supportive"


class CQState(str, Enum):
    OPEN = "open"
    FAVOURABLE = "favourable"
    UNFAVOURABLE = "unfavourable"


# A CQ targets a premise (by index), the scheme's applicability, or the
# conclusion. The target is explanatory metadata; attacks always hit the
# argument as a whole.
CQTarget = "int | str"


@dataclass(frozen=True)
class CriticalQuestion:
    cq_id: str
    text: str
    kind: CQKind
    target: int | str


@dataclass(frozen=True)
class StatementTemplate:
    """A statement with placeholder arguments.

    Placeholder grammar inside argument slots: ``{X}`` substitutes the
    binding of X as text, ``@X`` substitutes the quoted rendering of a
    statement-valued binding, and both may appear inside composites such
    as ``inputs({T})``.
    """

    predicate: Predicate
    args: tuple[str, ...]
    negated: bool = False


@dataclass(frozen=True)
class PremiseTemplate:
    text: str
    # Either a statement template or the name of a statement-valued
    # variable whose binding becomes the premise as-is.
    statement: StatementTemplate | str


@dataclass(frozen=True)
class SchemeDefinition:
    scheme_id: str
    name: str
    variables: tuple[str, ...]
    statement_variables: tuple[str, ...]
    premises: tuple[PremiseTemplate, ...]
    conclusion_text: str
    conclusion: StatementTemplate | str
    critical_questions: tuple[CriticalQuestion, ...]

    def cq(self, cq_id: str) -> CriticalQuestion:
        for cq in self.critical_questions:
            if cq.cq_id == cq_id:
                return cq
        raise UnknownSchemeError(f"scheme {self.scheme_id!r} has no critical question {cq_id!r}")


_PLACEHOLDER_RE = re.compile(r"\{(\w+)\}")
_QUOTED_VAR_RE = re.compile(r"@(\w+)")


def display_text(template: str) -> str:
    """Catalog form of a template: placeholders shown as bare variable names."""
    return _PLACEHOLDER_RE.sub(lambda m: m.group(1), template)


def display_arg(template: str) -> str:
    return display_text(_QUOTED_VAR_RE.sub(lambda m: m.group(1), template))


Binding = "str | Statement"


def _render_binding(value) -> str:
    return value.render() if isinstance(value, Statement) else str(value)


def substitute_text(template: str, bindings: Mapping[str, object]) -> str:
    rendered = {k: _render_binding(v) for k, v in bindings.items()}
    return _PLACEHOLDER_RE.sub(lambda m: rendered[m.group(1)], template)


def _substitute_arg(template: str, bindings: Mapping[str, object]) -> str:
    def quoted(match: re.Match) -> str:
        value = bindings[match.group(1)]
        if not isinstance(value, Statement):
            raise BindingError(f"variable {match.group(1)!r} must be bound to a statement")
        return quote(value)

    return substitute_text(_QUOTED_VAR_RE.sub(quoted, template), bindings)


def instantiate_statement(template: StatementTemplate | str,
                          bindings: Mapping[str, object]) -> Statement:
    if isinstance(template, str):
        value = bindings[template]
        if not isinstance(value, Statement):
            raise BindingError(f"variable {template!r} must be bound to a statement")
        return value
    args = tuple(_substitute_arg(arg, bindings) for arg in template.args)
    return Statement(template.predicate, args, template.negated)


def check_bindings(scheme: SchemeDefinition, bindings: Mapping[str, object]) -> None:
    for var in scheme.variables:
        if var not in bindings:
            raise BindingError(f"missing binding for variable {var!r} "
                               f"of scheme {scheme.scheme_id!r}")
    unknown = set(bindings) - set(scheme.variables)
    if unknown:
        raise BindingError(f"unknown binding(s) {sorted(unknown)} "
                           f"for scheme {scheme.scheme_id!r}")
    for var, value in bindings.items():
        if var in scheme.statement_variables:
            if not isinstance(value, Statement):
                raise BindingError(f"variable {var!r} must be bound to a statement")
        elif isinstance(value, Statement):
            raise BindingError(f"variable {var!r} must be bound to a plain constant")


# ---------------------------------------------------------------------------
# Scheme catalog
# ---------------------------------------------------------------------------

SCHEME_CATALOG: dict[str, SchemeDefinition] = {}


def _register(scheme: SchemeDefinition) -> SchemeDefinition:
    if scheme.scheme_id in SCHEME_CATALOG:
        raise ValueError(f"duplicate scheme id {scheme.scheme_id!r}")
    SCHEME_CATALOG[scheme.scheme_id] = scheme
    return scheme


SUSPICION_THROUGH_ADDRESS_CONTROL = _register(SchemeDefinition(
    scheme_id="suspicion-through-address-control",
    name="Suspicion through Address Control",
    variables=("E", "A", "O"),
    statement_variables=(),
    premises=(
        PremiseTemplate(
            "Address {A} is connected to offence {O}",
            StatementTemplate(Predicate.CONNECTED, ("{A}", "{O}")),
        ),
        PremiseTemplate(
            "Entity {E} controls address {A}",
            StatementTemplate(Predicate.CONTROLS, ("{E}", "{A}")),
        ),
    ),
    conclusion_text="Entity {E} is connected to offence {O}",
    conclusion=StatementTemplate(Predicate.CONNECTED, ("{E}", "{O}")),
    critical_questions=(
        CriticalQuestion(
            "cq1",
            "Which circumstantial evidence indicates that entity {E} controls address {A}?",
            CQKind.ASSUMPTION, 1),
        CriticalQuestion(
            "cq2",
            "Could it be that at the time of offence {O} someone else controlled "
            "address {A} instead of entity {E}?",
            CQKind.EXCEPTION, 1),
        CriticalQuestion(
            "cq3",
            "How was address {A} connected to offence {O} that {E}'s involvement is indicated?",
            CQKind.SUPPORTIVE, 0),
        CriticalQuestion(
            "cq4",
            "Are there other indicators that {E} is connect to offence {O}?",
            CQKind.SUPPORTIVE, "conclusion"),
    ),
))

CLUSTER_FROM_SOFTWARE = _register(SchemeDefinition(
    scheme_id="cluster-from-software",
    name="Cluster from Software",
    variables=("S", "A1", "A2", "E"),
    statement_variables=(),
    premises=(
        PremiseTemplate(
            "Software {S} establishes a link between address {A1} and address {A2}",
            StatementTemplate(Predicate.LINKED, ("{A1}", "{A2}")),
        ),
        PremiseTemplate(
            "Software {S} is reliable",
            StatementTemplate(Predicate.RELIABLE, ("{S}",)),
        ),
        PremiseTemplate(
            "Entity {E} controls address {A1}",
            StatementTemplate(Predicate.CONTROLS, ("{E}", "{A1}")),
        ),
    ),
    conclusion_text="Entity {E} controls address {A2}",
    conclusion=StatementTemplate(Predicate.CONTROLS, ("{E}", "{A2}")),
    critical_questions=(
        CriticalQuestion(
            "cq1",
            "How does software {S} establish the link?",
            CQKind.EXCEPTION, 0),
        CriticalQuestion(
            "cq2",
            "How reliable is software {S}? Why is software {S} considered reliable?",
            CQKind.ASSUMPTION, 1),
        CriticalQuestion(
            "cq3",
            "Could this link be also established without the use of software {S}, "
            "e.g. by using a different software, human-reasoning with the multi-input "
            "heuristic, or other non-blackbox methods?",
            CQKind.EXCEPTION, "applicability"),
        CriticalQuestion(
            "cq4",
            "What evidence exists for entity {E} controlling {A1}?",
            CQKind.ASSUMPTION, 2),
        CriticalQuestion(
            "cq5",
            "Are there other indicators that {E} might control {A2}?",
            CQKind.SUPPORTIVE, "conclusion"),
    ),
))

CLUSTER_FROM_MULTI_INPUT = _register(SchemeDefinition(
    scheme_id="cluster-from-multi-input",
    name="Cluster from Multi-Input",
    variables=("E", "T", "K"),
    statement_variables=(),
    premises=(
        PremiseTemplate(
            "Transaction {T} has multiple input addresses",
            StatementTemplate(Predicate.HAS_MULTIPLE_INPUTS, ("{T}",)),
        ),
        PremiseTemplate(
            "Entity {E} controls some input addresses of {T}",
            StatementTemplate(Predicate.CONTROLS, ("{E}", "{K}")),
        ),
    ),
    conclusion_text="Entity {E} controls all input addresses of {T}",
    conclusion=StatementTemplate(Predicate.CONTROLS, ("{E}", "inputs({T})")),
    critical_questions=(
        CriticalQuestion(
            "cq1",
            "Could {T} be a CoinJoin transaction?",
            CQKind.EXCEPTION, "applicability"),
        CriticalQuestion(
            "cq2",
            "Could it be that another entity F shares secret keys with {E} and "
            "thereby can control other or all inputs of {T}?",
            CQKind.EXCEPTION, "conclusion"),
        CriticalQuestion(
            "cq3",
            "Which input addresses of transaction {T} does entity {E} control? "
            "What evidence is there for {E} controlling these addresses?",
            CQKind.ASSUMPTION, 1),
        CriticalQuestion(
            "cq4",
            "Are there other indicators that {E} might control other input addresses of {T}?",
            CQKind.SUPPORTIVE, "conclusion"),
    ),
))

CLUSTER_BY_CHANGE_ADDRESS = _register(SchemeDefinition(
    scheme_id="cluster-by-change-address",
    name="Cluster by Change-Address",
    variables=("T", "C", "E", "V"),
    statement_variables=(),
    premises=(
        PremiseTemplate(
            "Transaction {T} has multiple output addresses",
            StatementTemplate(Predicate.HAS_MULTIPLE_OUTPUTS, ("{T}",)),
        ),
        PremiseTemplate(
            "Output address {C} is a change address of transaction {T}",
            StatementTemplate(Predicate.IS_CHANGE, ("{T}", "{V}")),
        ),
        PremiseTemplate(
            "Entity {E} controls all input addresses of {T}",
            StatementTemplate(Predicate.CONTROLS, ("{E}", "inputs({T})")),
        ),
    ),
    conclusion_text="Entity {E} also controls change address {C}",
    conclusion=StatementTemplate(Predicate.CONTROLS, ("{E}", "{C}")),
    critical_questions=(
        CriticalQuestion(
            "cq1",
            "Could {T} just have multiple distinct benefactors? Could the change "
            "for example be donated to a supported unrelated entity?",
            CQKind.EXCEPTION, 1),
        CriticalQuestion(
            "cq2",
            "What evidence is there suggesting that client software was used which "
            "generates a fresh change address for every new transaction?",
            CQKind.ASSUMPTION, 1),
        CriticalQuestion(
            "cq3",
            "Are there other indicators that {E} controls address {C}?",
            CQKind.SUPPORTIVE, "conclusion"),
    ),
))

POSITION_TO_KNOW = _register(SchemeDefinition(
    scheme_id="position-to-know",
    name="Argument from Position to Know",
    variables=("W", "A"),
    statement_variables=("A",),
    premises=(
        PremiseTemplate(
            "Source {W} is in a position to know whether {A}",
            StatementTemplate(Predicate.POSITION_TO_KNOW, ("{W}", "@A")),
        ),
        PremiseTemplate(
            "Source {W} is a reliable source",
            StatementTemplate(Predicate.RELIABLE, ("{W}",)),
        ),
    ),
    conclusion_text="{A}",
    conclusion="A",
    critical_questions=(
        CriticalQuestion(
            "cq1",
            "Is {W} in a position to know whether {A}?",
            CQKind.ASSUMPTION, 0),
        CriticalQuestion(
            "cq2",
            "Is {W} an honest (trustworthy, reliable) source?",
            CQKind.EXCEPTION, 1),
        CriticalQuestion(
            "cq3",
            "Did {W} actually assert {A}?",
            CQKind.ASSUMPTION, "applicability"),
    ),
))

ARGUMENT_FROM_SIGN = _register(SchemeDefinition(
    scheme_id="argument-from-sign",
    name="Argument from Sign",
    variables=("F", "C"),
    statement_variables=("F", "C"),
    premises=(
        PremiseTemplate("{F} is found to hold in this case", "F"),
        PremiseTemplate(
            "{F} is generally an indication that {C} holds",
            StatementTemplate(Predicate.SIGN_OF, ("@F", "@C")),
        ),
    ),
    conclusion_text="{C}",
    conclusion="C",
    critical_questions=(
        CriticalQuestion(
            "cq1",
            "How strongly does {F} indicate {C}?",
            CQKind.ASSUMPTION, 1),
        CriticalQuestion(
            "cq2",
            "Could {F} be present in this case without {C} holding?",
            CQKind.EXCEPTION, "applicability"),
    ),
))

ABDUCTIVE_INFERENCE = _register(SchemeDefinition(
    scheme_id="abductive-inference",
    name="Argument from Abductive Inference",
    variables=("E", "F"),
    statement_variables=("E", "F"),
    premises=(
        PremiseTemplate("{F} is a finding or given set of facts.", "F"),
        PremiseTemplate(
            "{E} is a satisfactory explanation of {F}.",
            StatementTemplate(Predicate.EXPLAINS, ("@E", "@F")),
        ),
        PremiseTemplate(
            "No alternative explanation E' given so far is as satisfactory as {E}.",
            StatementTemplate(Predicate.EXPLAINS, ("alternatives(@E)", "@F"), negated=True),
        ),
    ),
    conclusion_text="Therefore, {E} is plausible as hypothesis.",
    conclusion="E",
    critical_questions=(
        CriticalQuestion(
            "cq1",
            "How satisfactory is {E} as an explanation of {F}, apart from the "
            "alternative explanations available so far in the dialogue?",
            CQKind.ASSUMPTION, 1),
        CriticalQuestion(
            "cq2",
            "How much better an explanation is {E} than the alternative "
            "explanations available so far in the dialogue?",
            CQKind.ASSUMPTION, 2),
        CriticalQuestion(
            "cq3",
            "How far has the dialogue progressed? If the dialogue is an inquiry, "
            "how thorough has the investigation of the case been?",
            CQKind.SUPPORTIVE, "applicability"),
        CriticalQuestion(
            "cq4",
            "Would it be better to continue the dialogue further, instead of "
            "drawing a conclusion at this point?",
            CQKind.SUPPORTIVE, "applicability"),
    ),
))


def get_scheme(scheme_id: str) -> SchemeDefinition:
    try:
        return SCHEME_CATALOG[scheme_id]
    except KeyError:
        raise UnknownSchemeError(f"unknown scheme {scheme_id!r}") from None


def catalog_json_obj() -> dict:
    """Catalog rendered with unbound variable names, for API and golden tests."""
    out = {}
    for scheme_id, scheme in SCHEME_CATALOG.items():
        out[scheme_id] = {
            "name": scheme.name,
            "variables": list(scheme.variables),
            "premises": [display_text(p.text) for p in scheme.premises],
            "conclusion": display_text(scheme.conclusion_text),
            "critical_questions": [
                {
                    "cq_id": cq.cq_id,
                    "text": display_text(cq.text),
                    "kind": cq.kind.value,
                    "target": cq.target,
                }
                for cq in scheme.critical_questions
            ],
        }
    return out


# ---------------------------------------------------------------------------
# Arguments
# ---------------------------------------------------------------------------


class SupportKind(str, Enum):
    EVIDENCE = "evidence"
    ARGUMENT = "argument"


@dataclass(frozen=True)
class Support:
    kind: SupportKind
    ref: str


@dataclass
class CQStatus:
    state: CQState = CQState.OPEN
    justification: str = ""


@dataclass
class Argument:
    arg_id: str
    scheme_id: str
    bindings: dict
    premises: tuple[Statement, ...]
    conclusion: Statement
    premise_support: tuple[Support, ...]
    cq_state: dict = field(default_factory=dict)

    def scheme(self) -> SchemeDefinition:
        return get_scheme(self.scheme_id)

    def premise_texts(self) -> tuple[str, ...]:
        scheme = self.scheme()
        return tuple(substitute_text(p.text, self.bindings) for p in scheme.premises)

    def conclusion_rendered_text(self) -> str:
        return substitute_text(self.scheme().conclusion_text, self.bindings)

    def cq_status(self, cq_id: str) -> CQStatus:
        self.scheme().cq(cq_id)  # existence check
        return self.cq_state.setdefault(cq_id, CQStatus())

    def open_cqs(self) -> tuple[CriticalQuestion, ...]:
        return tuple(
            cq for cq in self.scheme().critical_questions
            if self.cq_status(cq.cq_id).state is CQState.OPEN
        )


# ---------------------------------------------------------------------------
# Premise grounding
# ---------------------------------------------------------------------------


def statement_supports(candidate: Statement, premise: Statement,
                       ts: TransactionSet | None) -> bool:
    """Decide whether a known statement supports a premise statement.

    Exact equality always supports. Three chain-aware entailments extend it
    for positive statements: a claim of control over ``inputs(T)`` supports
    control of any single input address of T and a link between any two of
    them, a claim of control over the only input address of T supports
    control over ``inputs(T)``, and linked(a, b) is symmetric.
    """
    if candidate == premise:
        return True
    if candidate.negated or premise.negated:
        return False

    if (candidate.predicate is Predicate.LINKED
            and premise.predicate is Predicate.LINKED
            and (candidate.args[1], candidate.args[0]) == premise.args):
        return True

    if ts is None or candidate.predicate is not Predicate.CONTROLS:
        return False

    txid = parse_inputs_constant(candidate.args[1])
    if txid is not None and txid in ts:
        input_addrs = set(ts.input_addresses(ts.get(txid)))
        if (premise.predicate is Predicate.CONTROLS
                and premise.args[0] == candidate.args[0]
                and premise.args[1] in input_addrs):
            return True
        if (premise.predicate is Predicate.LINKED
                and premise.args[0] != premise.args[1]
                and {premise.args[0], premise.args[1]} <= input_addrs):
            return True

    if premise.predicate is Predicate.CONTROLS and premise.args[0] == candidate.args[0]:
        txid = parse_inputs_constant(premise.args[1])
        if txid is not None and txid in ts:
            input_addrs = set(ts.input_addresses(ts.get(txid)))
            if input_addrs == {candidate.args[1]}:
                return True
    return False


def chain_fact_holds(statement: Statement, ts: TransactionSet) -> bool:
    """Check a chain-derived statement directly against the transaction set."""
    if statement.negated:
        return False
    if statement.predicate is Predicate.HAS_MULTIPLE_INPUTS:
        txid = statement.args[0]
        if txid not in ts:
            return False
        return len(set(ts.input_addresses(ts.get(txid)))) >= 2
    if statement.predicate is Predicate.HAS_MULTIPLE_OUTPUTS:
        txid = statement.args[0]
        if txid not in ts:
            return False
        return len({out.address for out in ts.get(txid).outputs}) >= 2
    return False


def _unique_evidence_id(case, base: str) -> str:
    if all(ev.evidence_id != base for ev in case.evidence):
        return base
    n = 2
    while any(ev.evidence_id == f"{base}-{n}" for ev in case.evidence):
        n += 1
    return f"{base}-{n}"


def _ensure_chain_fact_evidence(case, statement: Statement, ts: TransactionSet) -> Support:
    if not chain_fact_holds(statement, ts):
        raise GroundingError(
            f"premise {statement.render()!r} is not verified by the chain"
        )
    for ev in case.evidence:
        if ev.statement == statement:
            return Support(SupportKind.EVIDENCE, ev.evidence_id)
    txid = statement.args[0]
    tx = ts.get(txid)
    if statement.predicate is Predicate.HAS_MULTIPLE_INPUTS:
        n = len(set(ts.input_addresses(tx)))
        base = f"ev-chain-{txid}-inputs"
        detail = f"transaction {txid} spends from {n} distinct addresses"
    else:
        n = len({out.address for out in tx.outputs})
        base = f"ev-chain-{txid}-outputs"
        detail = f"transaction {txid} pays to {n} distinct addresses"
    item = EvidenceItem(_unique_evidence_id(case, base), statement, "chain file", detail)
    case.evidence.append(item)
    return Support(SupportKind.EVIDENCE, item.evidence_id)


def _ensure_change_evidence(case, statement: Statement, ts: TransactionSet,
                            params: HeuristicParams) -> Support:
    txid, vout_text = statement.args
    if txid not in ts:
        raise GroundingError(f"premise {statement.render()!r} references unknown transaction")
    result = detect_change_output(ts.get(txid), ts, params)
    if result is None or str(result.vout) != vout_text or statement.negated:
        raise GroundingError(
            f"premise {statement.render()!r} is not confirmed by the change-output detector"
        )
    for ev in case.evidence:
        if ev.statement == statement:
            return Support(SupportKind.EVIDENCE, ev.evidence_id)
    item = EvidenceItem(
        _unique_evidence_id(case, f"ev-change-{txid}"),
        statement, "change-output detector", result.reason,
    )
    case.evidence.append(item)
    return Support(SupportKind.EVIDENCE, item.evidence_id)


def resolve_support(case, premise: Statement, ts: TransactionSet | None,
                    params: HeuristicParams = HeuristicParams()) -> Support:
    """Find a support entry for a premise: evidence first, then arguments,
    then chain-verified facts (which materialize as evidence items)."""
    for ev in case.evidence:
        if statement_supports(ev.statement, premise, ts):
            return Support(SupportKind.EVIDENCE, ev.evidence_id)
    for arg in case.arguments:
        if statement_supports(arg.conclusion, premise, ts):
            return Support(SupportKind.ARGUMENT, arg.arg_id)
    if ts is not None:
        if premise.predicate in (Predicate.HAS_MULTIPLE_INPUTS, Predicate.HAS_MULTIPLE_OUTPUTS):
            return _ensure_chain_fact_evidence(case, premise, ts)
        if premise.predicate is Predicate.IS_CHANGE and not premise.negated:
            return _ensure_change_evidence(case, premise, ts, params)
    raise GroundingError(
        f"premise {premise.render()!r} is not supported by any evidence item "
        "or argument conclusion in the case"
    )


def _validate_explicit_support(case, premise: Statement, support: Support,
                               ts: TransactionSet | None) -> Support:
    if support.kind is SupportKind.EVIDENCE:
        for ev in case.evidence:
            if ev.evidence_id == support.ref:
                if not statement_supports(ev.statement, premise, ts):
                    raise GroundingError(
                        f"evidence {support.ref!r} does not support premise "
                        f"{premise.render()!r}"
                    )
                return support
        raise GroundingError(f"unknown evidence id {support.ref!r}")
    for arg in case.arguments:
        if arg.arg_id == support.ref:
            if not statement_supports(arg.conclusion, premise, ts):
                raise GroundingError(
                    f"argument {support.ref!r} does not conclude premise "
                    f"{premise.render()!r}"
                )
            return support
    raise GroundingError(f"unknown argument id {support.ref!r}")


def instantiate(case, scheme_id: str, bindings: Mapping[str, object],
                supports: Mapping[int, Support] | None = None,
                params: HeuristicParams = HeuristicParams()) -> Argument:
    """Instantiate a scheme into the case and return the new argument.

    Bindings must cover exactly the scheme's variables. Every premise gets
    one support entry: an explicitly passed one (validated) or the first
    matching evidence item, then argument conclusion, then chain-verified
    fact. All critical questions start open.
    """
    scheme = get_scheme(scheme_id)
    check_bindings(scheme, bindings)
    bindings = dict(bindings)
    premises = tuple(instantiate_statement(p.statement, bindings) for p in scheme.premises)
    conclusion = instantiate_statement(scheme.conclusion, bindings)

    ts = case.chain_set()
    support_list = []
    for idx, premise in enumerate(premises):
        if supports and idx in supports:
            support_list.append(_validate_explicit_support(case, premise, supports[idx], ts))
        else:
            support_list.append(resolve_support(case, premise, ts, params))

    arg = Argument(
        arg_id=case.allocate_arg_id(),
        scheme_id=scheme_id,
        bindings=bindings,
        premises=premises,
        conclusion=conclusion,
        premise_support=tuple(support_list),
        cq_state={cq.cq_id: CQStatus() for cq in scheme.critical_questions},
    )
    case.arguments.append(arg)
    case.bump_revision()
    return arg


# ---------------------------------------------------------------------------
# Automatic instantiation from heuristics
# ---------------------------------------------------------------------------


def _controlled_addresses(case, ts: TransactionSet) -> dict[str, dict[str, Support]]:
    """Addresses each constant is claimed to control, with one support each.

    Evidence items take precedence over argument conclusions; conclusions
    over inputs(T) composites are expanded through the chain.
    """
    known: dict[str, dict[str, Support]] = {}

    def note(owner: str, address: str, support: Support):
        known.setdefault(owner, {}).setdefault(address, support)

    for ev in case.evidence:
        s = ev.statement
        if s.predicate is Predicate.CONTROLS and not s.negated:
            support = Support(SupportKind.EVIDENCE, ev.evidence_id)
            txid = parse_inputs_constant(s.args[1])
            if txid is not None and txid in ts:
                for addr in ts.input_addresses(ts.get(txid)):
                    note(s.args[0], addr, support)
            else:
                note(s.args[0], s.args[1], support)
    for arg in case.arguments:
        s = arg.conclusion
        if s.predicate is Predicate.CONTROLS and not s.negated:
            support = Support(SupportKind.ARGUMENT, arg.arg_id)
            txid = parse_inputs_constant(s.args[1])
            if txid is not None and txid in ts:
                for addr in ts.input_addresses(ts.get(txid)):
                    note(s.args[0], addr, support)
            else:
                note(s.args[0], s.args[1], support)
    return known


def _has_argument(case, scheme_id: str, entity: str, txid: str) -> bool:
    return any(
        arg.scheme_id == scheme_id
        and arg.bindings.get("E") == entity
        and arg.bindings.get("T") == txid
        for arg in case.arguments
    )


def auto_instantiate(case, params: HeuristicParams = HeuristicParams()) -> list[Argument]:
    """Instantiate clustering arguments the heuristics can justify.

    Phase one emits a multi-input argument per (entity, transaction) where
    the transaction spends from several addresses, is not CoinJoin-flagged,
    and the case already holds control of at least one input address.
    Phase two emits a change-address argument per detected change output
    whose transaction's input addresses are all case-held for the entity.
    Runs are deterministic (chain order, then case entity order) and
    deduplicate against existing arguments by (scheme, entity, transaction).
    """
    ts = case.chain_set()
    added: list[Argument] = []
    entity_ids = [entity.entity_id for entity in case.entities]

    known = _controlled_addresses(case, ts)
    for tx in ts.transactions:
        if tx.is_coinbase:
            continue
        input_addrs = set(ts.input_addresses(tx))
        if len(input_addrs) < 2:
            continue
        if params.apply_coinjoin_filter and detect_coinjoin(tx, ts, params):
            continue
        for entity in entity_ids:
            held = known.get(entity, {})
            controlled = sorted(input_addrs & set(held))
            if not controlled:
                continue
            if _has_argument(case, CLUSTER_FROM_MULTI_INPUT.scheme_id, entity, tx.txid):
                continue
            anchor = controlled[0]
            arg = instantiate(
                case, CLUSTER_FROM_MULTI_INPUT.scheme_id,
                {"E": entity, "T": tx.txid, "K": anchor},
                supports={1: held[anchor]},
                params=params,
            )
            added.append(arg)

    known = _controlled_addresses(case, ts)
    for tx in ts.transactions:
        if tx.is_coinbase:
            continue
        if params.apply_coinjoin_filter and detect_coinjoin(tx, ts, params):
            continue
        change = detect_change_output(tx, ts, params)
        if change is None:
            continue
        for entity in entity_ids:
            premise = Statement(Predicate.CONTROLS, (entity, inputs_constant(tx.txid)))
            try:
                support = resolve_support(case, premise, ts, params)
            except GroundingError:
                continue
            if _has_argument(case, CLUSTER_BY_CHANGE_ADDRESS.scheme_id, entity, tx.txid):
                continue
            arg = instantiate(
                case, CLUSTER_BY_CHANGE_ADDRESS.scheme_id,
                {"E": entity, "T": tx.txid, "V": str(change.vout), "C": change.address},
                supports={2: support},
                params=params,
            )
            added.append(arg)
    return added


# ---------------------------------------------------------------------------
# Critical question state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OpenCQ:
    arg_id: str
    cq_id: str
    kind: CQKind
    text: str


def find_argument(case, arg_id: str) -> Argument:
    for arg in case.arguments:
        if arg.arg_id == arg_id:
            return arg
    raise UnknownSchemeError(f"case has no argument {arg_id!r}")


def answer_cq(case, arg_id: str, cq_id: str, answer: str, justification: str) -> Argument:
    """Record a critical-question answer; answers are revisable and the
    case keeps the full answer history."""
    arg = find_argument(case, arg_id)
    cq = arg.scheme().cq(cq_id)
    try:
        state = CQState(answer)
    except ValueError:
        raise SchemeError(
            f"answer must be 'favourable' or 'unfavourable', got {answer!r}"
        ) from None
    if state is CQState.OPEN:
        raise SchemeError("answer must be 'favourable' or 'unfavourable'")
    if not justification or not justification.strip():
        raise SchemeError("a non-empty justification is required")
    arg.cq_state[cq.cq_id] = CQStatus(state, justification)
    case.record_cq_answer(arg_id, cq_id, state.value, justification)
    case.bump_revision()
    return arg


def list_open_cqs(case) -> tuple[OpenCQ, ...]:
    """All open critical questions, ordered by argument then catalog order."""
    rows = []
    for arg in case.arguments:
        for cq in arg.scheme().critical_questions:
            if arg.cq_status(cq.cq_id).state is CQState.OPEN:
                rows.append(OpenCQ(arg.arg_id, cq.cq_id, cq.kind,
                                   substitute_text(cq.text, arg.bindings)))
    return tuple(rows)
