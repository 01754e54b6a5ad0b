"""JSON-ready payload builders shared by the REST service and the CLI.

Keeping these in one place makes the two front ends agree by construction:
both render the same dict shapes for arguments, evaluations, frameworks,
clusters, and critical questions.
"""

from __future__ import annotations

from chaincase import afcore
from chaincase.casefile import CaseFile
from chaincase.heuristics import HeuristicParams, detect_coinjoin, multi_input_cluster
from chaincase.schemes import Argument, CQState, substitute_text


def argument_payload(arg: Argument, labelling=None) -> dict:
    scheme = arg.scheme()
    return {
        "arg_id": arg.arg_id,
        "scheme_id": arg.scheme_id,
        "scheme_name": scheme.name,
        "bindings": {
            var: (value.render() if hasattr(value, "render") else value)
            for var, value in arg.bindings.items()
        },
        "premises": [
            {
                "text": text,
                "statement": premise.render(),
                "support": {"kind": support.kind.value, "ref": support.ref},
            }
            for text, premise, support in zip(
                arg.premise_texts(), arg.premises, arg.premise_support)
        ],
        "conclusion": {
            "text": arg.conclusion_rendered_text(),
            "statement": arg.conclusion.render(),
        },
        "label": None if labelling is None else labelling.get(arg.arg_id),
        "critical_questions": [
            {
                "cq_id": cq.cq_id,
                "kind": cq.kind.value,
                "text": substitute_text(cq.text, arg.bindings),
                "state": arg.cq_status(cq.cq_id).state.value,
                "justification": arg.cq_status(cq.cq_id).justification,
            }
            for cq in scheme.critical_questions
        ],
    }


def framework_payload(framework: afcore.ArgumentationFramework) -> dict:
    return {
        "nodes": [
            {"id": node, "kind": framework.node_kinds[node]}
            for node in framework.nodes
        ],
        "attacks": [
            {
                "attacker": attack.attacker,
                "target": attack.target,
                "reason": attack.reason,
                "via": attack.via,
            }
            for attack in framework.attacks
        ],
        "objections": {
            node: {"arg_id": ref[0], "cq_id": ref[1]}
            for node, ref in framework.objections.items()
        },
    }


def evaluation_payload(case: CaseFile) -> dict:
    evaluation = case.evaluate()
    return {
        "case_id": case.case_id,
        "revision": evaluation.revision,
        "semantics": "grounded",
        "open_assumptions_attack": evaluation.open_assumptions_attack,
        "labelling": dict(evaluation.labelling),
        "statements": dict(evaluation.statement_statuses),
        "framework": framework_payload(evaluation.framework),
    }


def clusters_payload(case: CaseFile, apply_filter: bool) -> dict:
    params = HeuristicParams(apply_coinjoin_filter=apply_filter)
    ts = case.chain_set()
    partition = multi_input_cluster(ts, params)
    tag_index: dict[str, set[str]] = {}
    for tag in case.attribution_tags:
        for address in tag.addresses:
            tag_index.setdefault(address, set()).add(tag.entity_id)
    coinjoin = []
    for tx in ts.transactions:
        check = detect_coinjoin(tx, ts, params)
        if check:
            coinjoin.append({"txid": tx.txid, "reason": check.reason})
    return {
        "coinjoin_filter": apply_filter,
        "clusters": [
            {
                "addresses": sorted(members),
                "entities": sorted({
                    e for a in members for e in tag_index.get(a, ())
                }),
            }
            for members in partition.clusters
        ],
        "merges": [
            {"txid": m.txid, "address_a": m.address_a, "address_b": m.address_b}
            for m in partition.provenance
        ],
        "coinjoin_flagged": coinjoin,
    }


def cqs_payload(case: CaseFile, status: str) -> list[dict]:
    rows = []
    for arg in case.arguments:
        for cq in arg.scheme().critical_questions:
            state = arg.cq_status(cq.cq_id)
            if status == "open" and state.state is not CQState.OPEN:
                continue
            if status == "answered" and state.state is CQState.OPEN:
                continue
            rows.append({
                "arg_id": arg.arg_id,
                "cq_id": cq.cq_id,
                "kind": cq.kind.value,
                "state": state.state.value,
                "text": substitute_text(cq.text, arg.bindings),
                "justification": state.justification,
            })
    return rows
