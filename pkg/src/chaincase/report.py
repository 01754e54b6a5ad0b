"""Suspicion reports: qualitative tiers over evaluated statements.

For every statement concluded by some argument, the report carries its
labelling status, a tier, the full supporting chain of arguments and
schemes, every critical question on that chain with its state, and the
objections that defeat it (if any). Tiers are a pure function of the
labelling and the critical-question states:

* corroborated: IN and no open question anywhere on the supporting chain,
* presumptive: IN with open questions remaining,
* contested: UNDEC,
* defeated: OUT.

The tier names are project-defined qualitative shorthands; nothing here
computes a legal determination. Cluster lines carry the provenance txid of
every merge they rest on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from chaincase.afcore import IN, OUT, UNDEC, objection_node_id
from chaincase.casefile import CaseFile
from chaincase.heuristics import HeuristicParams, multi_input_cluster
from chaincase.schemes import Argument, CQState, SupportKind, substitute_text

TIER_CORROBORATED = "corroborated"
TIER_PRESUMPTIVE = "presumptive"
TIER_CONTESTED = "contested"
TIER_DEFEATED = "defeated"


@dataclass(frozen=True)
class CQLine:
    arg_id: str
    cq_id: str
    kind: str
    state: str
    text: str
    justification: str


@dataclass(frozen=True)
class DefeaterLine:
    attacker: str          # attacking node id (objection or argument)
    target: str            # the chain argument it strikes
    reason: str
    text: str              # bound question text, or the counter-conclusion


@dataclass(frozen=True)
class ChainLink:
    arg_id: str
    scheme_id: str
    scheme_name: str
    label: str
    conclusion: str


@dataclass(frozen=True)
class StatementFinding:
    statement: str
    status: str
    tier: str
    concluding_args: tuple[str, ...]
    chain: tuple[ChainLink, ...]
    cq_lines: tuple[CQLine, ...]
    open_cq_count: int
    defeaters: tuple[DefeaterLine, ...]


@dataclass(frozen=True)
class ClusterLine:
    addresses: tuple[str, ...]
    entities: tuple[str, ...]      # display-only attribution tags that touch it
    merge_txids: tuple[str, ...]   # provenance of every union inside it


@dataclass(frozen=True)
class SuspicionReport:
    case_id: str
    revision: int
    semantics: str
    open_assumptions_attack: bool
    findings: tuple[StatementFinding, ...]
    clusters: tuple[ClusterLine, ...]


def _support_closure(case: CaseFile, roots: list[Argument]) -> list[Argument]:
    """The roots plus every argument they transitively rest on, case order."""
    wanted: set[str] = set()
    frontier = [arg.arg_id for arg in roots]
    while frontier:
        arg_id = frontier.pop()
        if arg_id in wanted:
            continue
        wanted.add(arg_id)
        for support in case.argument(arg_id).premise_support:
            if support.kind is SupportKind.ARGUMENT:
                frontier.append(support.ref)
    return [arg for arg in case.arguments if arg.arg_id in wanted]


def _tier(status: str, open_count: int) -> str:
    if status == IN:
        return TIER_CORROBORATED if open_count == 0 else TIER_PRESUMPTIVE
    if status == OUT:
        return TIER_DEFEATED
    return TIER_CONTESTED


def generate_report(case: CaseFile, params: HeuristicParams = HeuristicParams(),
                    open_assumptions_attack: bool = True) -> SuspicionReport:
    evaluation = case.evaluate(open_assumptions_attack=open_assumptions_attack)
    labelling = evaluation.labelling
    framework = evaluation.framework

    findings: list[StatementFinding] = []
    seen: set[str] = set()
    for arg in case.arguments:
        rendered = arg.conclusion.render()
        if rendered in seen:
            continue
        seen.add(rendered)
        status = evaluation.statement_statuses[rendered]
        concluding = [a for a in case.arguments if a.conclusion == arg.conclusion]
        chain_args = _support_closure(case, concluding)
        chain_ids = {a.arg_id for a in chain_args}

        cq_lines = []
        open_count = 0
        for member in chain_args:
            scheme = member.scheme()
            for cq in scheme.critical_questions:
                state = member.cq_status(cq.cq_id)
                if state.state is CQState.OPEN:
                    open_count += 1
                cq_lines.append(CQLine(
                    member.arg_id, cq.cq_id, cq.kind.value, state.state.value,
                    substitute_text(cq.text, member.bindings),
                    state.justification,
                ))

        defeaters = []
        for attack in framework.attacks:
            if attack.target not in chain_ids:
                continue
            if labelling.get(attack.attacker) != IN:
                continue
            objection = framework.objections.get(attack.attacker)
            if objection is not None:
                obj_arg = case.argument(objection[0])
                cq = obj_arg.scheme().cq(objection[1])
                text = substitute_text(cq.text, obj_arg.bindings)
            else:
                text = case.argument(attack.attacker).conclusion.render()
            line = DefeaterLine(attack.attacker, attack.target, attack.reason, text)
            if line not in defeaters:
                defeaters.append(line)

        chain = tuple(
            ChainLink(member.arg_id, member.scheme_id, member.scheme().name,
                      labelling.get(member.arg_id, UNDEC), member.conclusion.render())
            for member in chain_args
        )
        findings.append(StatementFinding(
            statement=rendered,
            status=status,
            tier=_tier(status, open_count),
            concluding_args=tuple(a.arg_id for a in concluding),
            chain=chain,
            cq_lines=tuple(cq_lines),
            open_cq_count=open_count,
            defeaters=tuple(defeaters),
        ))

    ts = case.chain_set()
    partition = multi_input_cluster(ts, params)
    tag_index: dict[str, set[str]] = {}
    for tag in case.attribution_tags:
        for address in tag.addresses:
            tag_index.setdefault(address, set()).add(tag.entity_id)
    clusters = []
    for members in partition.clusters:
        if len(members) < 2:
            continue
        addresses = tuple(sorted(members))
        entities = tuple(sorted({e for a in addresses for e in tag_index.get(a, ())}))
        txids = tuple(sorted({
            record.txid for record in partition.provenance
            if record.address_a in members or record.address_b in members
        }))
        clusters.append(ClusterLine(addresses, entities, txids))
    clusters.sort(key=lambda line: line.addresses)

    return SuspicionReport(
        case_id=case.case_id,
        revision=case.revision,
        semantics="grounded",
        open_assumptions_attack=open_assumptions_attack,
        findings=tuple(findings),
        clusters=tuple(clusters),
    )


def report_json_obj(report: SuspicionReport) -> dict:
    return {
        "case_id": report.case_id,
        "revision": report.revision,
        "semantics": report.semantics,
        "open_assumptions_attack": report.open_assumptions_attack,
        "findings": [
            {
                "statement": f.statement,
                "status": f.status,
                "tier": f.tier,
                "concluding_args": list(f.concluding_args),
                "chain": [
                    {
                        "arg_id": link.arg_id,
                        "scheme_id": link.scheme_id,
                        "scheme_name": link.scheme_name,
                        "label": link.label,
                        "conclusion": link.conclusion,
                    }
                    for link in f.chain
                ],
                "critical_questions": [
                    {
                        "arg_id": line.arg_id,
                        "cq_id": line.cq_id,
                        "kind": line.kind,
                        "state": line.state,
                        "text": line.text,
                        "justification": line.justification,
                    }
                    for line in f.cq_lines
                ],
                "open_cq_count": f.open_cq_count,
                "defeaters": [
                    {
                        "attacker": d.attacker,
                        "target": d.target,
                        "reason": d.reason,
                        "text": d.text,
                    }
                    for d in f.defeaters
                ],
            }
            for f in report.findings
        ],
        "clusters": [
            {
                "addresses": list(line.addresses),
                "entities": list(line.entities),
                "merge_txids": list(line.merge_txids),
            }
            for line in report.clusters
        ],
    }


def report_json(report: SuspicionReport) -> str:
    return json.dumps(report_json_obj(report), indent=2, sort_keys=True) + "\n"


def render_markdown(report: SuspicionReport) -> str:
    lines: list[str] = []
    out = lines.append
    out(f"# Suspicion report: {report.case_id}")
    out("")
    out(f"Semantics: {report.semantics} (revision {report.revision}; "
        f"open assumption questions "
        f"{'attack' if report.open_assumptions_attack else 'do not attack'}).")
    out("")
    out("## Findings")
    for i, finding in enumerate(report.findings, start=1):
        out("")
        out(f"### {i}. `{finding.statement}` — {finding.tier.upper()}")
        out("")
        out(f"- Status: {finding.status}")
        out(f"- Concluded by: {', '.join(finding.concluding_args)}")
        out("- Supporting chain:")
        for link in finding.chain:
            out(f"  - {link.arg_id} [{link.label}] {link.scheme_name}: "
                f"`{link.conclusion}`")
        if finding.defeaters:
            out("- Defeated by:")
            for d in finding.defeaters:
                out(f"  - {d.attacker} ({d.reason}) striking {d.target}: {d.text}")
        out(f"- Critical questions ({finding.open_cq_count} open):")
        for line in finding.cq_lines:
            suffix = f" — {line.justification}" if line.justification else ""
            out(f"  - [{line.state}] {line.arg_id}/{line.cq_id} ({line.kind}): "
                f"{line.text}{suffix}")
    out("")
    out("## Clusters (multi-input heuristic)")
    if not report.clusters:
        out("")
        out("No multi-address clusters.")
    for line in report.clusters:
        out("")
        out(f"- Cluster: {', '.join(line.addresses)}")
        if line.entities:
            out(f"  - Tagged entities: {', '.join(line.entities)}")
        out(f"  - Merged by transaction(s): {', '.join(line.merge_txids)}")
    out("")
    return "\n".join(lines)
