"""Abstract argumentation: framework compilation and labelling semantics.

A case compiles into a directed attack graph whose nodes are the case's
arguments plus one objection node per critical question currently held
against an argument. Attacks come from four sources:

* rebut: contrary conclusions attack each other,
* undermine: a conclusion contrary to another argument's premise,
* assumption questions that are open (optionally) or answered
  unfavourably,
* exception questions answered unfavourably.

Every attack on an argument also strikes the arguments that transitively
build on it through premise support, so defeat propagates along reasoning
chains.

Labellings assign IN, OUT, or UNDEC to each node. The grounded labelling
is computed as a least fixpoint; complete labellings by exhaustive
enumeration with a hard node-count guard.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from chaincase.schemes import Argument, CQKind, CQState, SupportKind
from chaincase.statements import Statement

IN = "IN"
OUT = "OUT"
UNDEC = "UNDEC"

COMPLETE_ENUMERATION_LIMIT = 20


class TooManyNodesError(ValueError):
    """Raised when exhaustive labelling enumeration would be intractable."""


@dataclass(frozen=True)
class Attack:
    attacker: str
    target: str
    reason: str
    # For attacks propagated along support chains: the argument that was
    # attacked directly. None for direct attacks.
    via: str | None = None


@dataclass(frozen=True)
class ArgumentationFramework:
    nodes: tuple[str, ...]
    attacks: tuple[Attack, ...]
    node_kinds: Mapping[str, str]
    # objection node id -> (arg_id, cq_id)
    objections: Mapping[str, tuple[str, str]]

    def attackers_of(self, node: str) -> tuple[str, ...]:
        seen = []
        for attack in self.attacks:
            if attack.target == node and attack.attacker not in seen:
                seen.append(attack.attacker)
        return tuple(seen)


def objection_node_id(arg_id: str, cq_id: str) -> str:
    return f"cq:{arg_id}:{cq_id}"


def _dependents_closure(arguments: Sequence[Argument]) -> dict[str, frozenset[str]]:
    """For each argument, the set of arguments transitively built on it."""
    direct: dict[str, set[str]] = {arg.arg_id: set() for arg in arguments}
    for arg in arguments:
        for support in arg.premise_support:
            if support.kind is SupportKind.ARGUMENT:
                direct.setdefault(support.ref, set()).add(arg.arg_id)
    closure: dict[str, frozenset[str]] = {}
    for root in direct:
        seen: set[str] = set()
        frontier = list(direct[root])
        while frontier:
            node = frontier.pop()
            if node in seen:
                continue
            seen.add(node)
            frontier.extend(direct.get(node, ()))
        closure[root] = frozenset(seen)
    return closure


def _objection_fires(kind: CQKind, state: CQState, open_assumptions_attack: bool) -> bool:
    if kind is CQKind.ASSUMPTION:
        if state is CQState.UNFAVOURABLE:
            return True
        return state is CQState.OPEN and open_assumptions_attack
    if kind is CQKind.EXCEPTION:
        return state is CQState.UNFAVOURABLE
    return False


def build_framework(case, open_assumptions_attack: bool = True) -> ArgumentationFramework:
    """Compile a case into its attack graph.

    With ``open_assumptions_attack`` (the default, the skeptical stance),
    an unanswered assumption question already attacks its argument; set it
    to False to only count questions explicitly answered unfavourably.
    """
    arguments: Sequence[Argument] = case.arguments

    direct: list[tuple[str, str, str]] = []
    for attacker in arguments:
        for target in arguments:
            if attacker.arg_id == target.arg_id:
                continue
            if attacker.conclusion.is_contrary_of(target.conclusion):
                direct.append((attacker.arg_id, target.arg_id, "rebut"))
                continue
            for premise in target.premises:
                if attacker.conclusion.is_contrary_of(premise):
                    direct.append((attacker.arg_id, target.arg_id, "undermine"))
                    break

    objections: dict[str, tuple[str, str]] = {}
    for arg in arguments:
        for cq in arg.scheme().critical_questions:
            state = arg.cq_status(cq.cq_id).state
            if _objection_fires(cq.kind, state, open_assumptions_attack):
                node = objection_node_id(arg.arg_id, cq.cq_id)
                objections[node] = (arg.arg_id, cq.cq_id)
                direct.append((node, arg.arg_id, f"{cq.kind.value}-{state.value}"))

    closure = _dependents_closure(arguments)
    attacks: list[Attack] = []
    seen: set[tuple[str, str, str, str | None]] = set()

    def add(attacker: str, target: str, reason: str, via: str | None):
        if attacker == target:
            return
        key = (attacker, target, reason, via)
        if key not in seen:
            seen.add(key)
            attacks.append(Attack(attacker, target, reason, via))

    for attacker, target, reason in direct:
        add(attacker, target, reason, None)
        for dependent in closure.get(target, frozenset()):
            add(attacker, dependent, reason, target)

    nodes = tuple(arg.arg_id for arg in arguments) + tuple(sorted(objections))
    node_kinds = {arg.arg_id: "argument" for arg in arguments}
    node_kinds.update({node: "objection" for node in objections})
    attacks.sort(key=lambda a: (a.attacker, a.target, a.reason, a.via or ""))
    return ArgumentationFramework(nodes, tuple(attacks), node_kinds, objections)


# ---------------------------------------------------------------------------
# Semantics
# ---------------------------------------------------------------------------


def _attacker_index(af: ArgumentationFramework) -> dict[str, tuple[str, ...]]:
    return {node: af.attackers_of(node) for node in af.nodes}


def grounded_labelling(af: ArgumentationFramework) -> dict[str, str]:
    """The unique grounded labelling, by least-fixpoint iteration.

    Nodes whose attackers are all OUT become IN; nodes with an IN attacker
    become OUT; whatever never settles stays UNDEC.
    """
    attackers = _attacker_index(af)
    labels = {node: UNDEC for node in af.nodes}
    changed = True
    while changed:
        changed = False
        for node in af.nodes:
            if labels[node] != UNDEC:
                continue
            atk = attackers[node]
            if all(labels[a] == OUT for a in atk):
                labels[node] = IN
                changed = True
            elif any(labels[a] == IN for a in atk):
                labels[node] = OUT
                changed = True
    return labels


def complete_labellings(af: ArgumentationFramework) -> tuple[dict[str, str], ...]:
    """All complete labellings, by exhaustive enumeration of IN-sets.

    Guarded: raises TooManyNodesError beyond COMPLETE_ENUMERATION_LIMIT
    nodes, since the enumeration is exponential by design.
    """
    nodes = list(af.nodes)
    n = len(nodes)
    if n > COMPLETE_ENUMERATION_LIMIT:
        raise TooManyNodesError(
            f"refusing to enumerate labellings of {n} nodes "
            f"(limit {COMPLETE_ENUMERATION_LIMIT})"
        )
    index = {node: i for i, node in enumerate(nodes)}
    attacker_bits = [0] * n
    for attack in af.attacks:
        attacker_bits[index[attack.target]] |= 1 << index[attack.attacker]

    labellings = []
    for in_mask in range(1 << n):
        out_mask = 0
        for i in range(n):
            if attacker_bits[i] & in_mask:
                out_mask |= 1 << i
        if in_mask & out_mask:
            continue
        legal = True
        for i in range(n):
            bit = 1 << i
            if in_mask & bit:
                # every attacker must be OUT
                if attacker_bits[i] & ~out_mask:
                    legal = False
                    break
            elif not (out_mask & bit):
                # UNDEC: must not be the case that all attackers are OUT
                if attacker_bits[i] & ~out_mask == 0:
                    legal = False
                    break
        if not legal:
            continue
        labelling = {}
        for i, node in enumerate(nodes):
            bit = 1 << i
            labelling[node] = IN if in_mask & bit else OUT if out_mask & bit else UNDEC
        labellings.append(labelling)
    return tuple(labellings)


def statement_status(arguments: Iterable[Argument], labelling: Mapping[str, str],
                     statement: Statement) -> str:
    """Status of a statement under a labelling: IN if some argument
    concluding it is IN, OUT if at least one concludes it and all are OUT,
    UNDEC otherwise (including when nothing concludes it)."""
    concluding = [arg for arg in arguments if arg.conclusion == statement]
    if not concluding:
        return UNDEC
    labels = [labelling.get(arg.arg_id, UNDEC) for arg in concluding]
    if any(label == IN for label in labels):
        return IN
    if all(label == OUT for label in labels):
        return OUT
    return UNDEC


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

_APX_SAFE = re.compile(r"[^A-Za-z0-9_]")


def _apx_names(nodes: Sequence[str]) -> dict[str, str]:
    names: dict[str, str] = {}
    used: set[str] = set()
    for node in nodes:
        base = _APX_SAFE.sub("_", node)
        if not base or not (base[0].isalpha()):
            base = "n_" + base
        name = base
        suffix = 2
        while name in used:
            name = f"{base}_{suffix}"
            suffix += 1
        used.add(name)
        names[node] = name
    return names


def to_apx(af: ArgumentationFramework) -> str:
    """Render the framework in the common apx text format."""
    names = _apx_names(af.nodes)
    lines = [f"arg({names[node]})." for node in af.nodes]
    seen_pairs: set[tuple[str, str]] = set()
    for attack in af.attacks:
        pair = (names[attack.attacker], names[attack.target])
        if pair not in seen_pairs:
            seen_pairs.add(pair)
            lines.append(f"att({pair[0]},{pair[1]}).")
    return "\n".join(lines) + "\n"
