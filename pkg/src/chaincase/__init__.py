"""Evidential reasoning toolkit for cryptocurrency tracing.

The package combines three layers:

* a UTXO transaction-graph model with parsing and validation,
* clustering heuristics (multi-input, CoinJoin screening, change detection,
  flow tracing) that produce auditable provenance,
* an argumentation layer that turns heuristic findings and case evidence
  into scheme-based arguments with critical questions, compiles them into
  an abstract argumentation framework, and evaluates it under grounded
  (and complete) semantics.

Case files tie the layers together and are served over a REST API and a CLI.
"""

from chaincase.chain import (
    Outpoint,
    Transaction,
    TransactionSet,
    TxOutput,
    parse_chain_file,
    validate_set,
)
from chaincase.heuristics import (
    HeuristicParams,
    detect_change_output,
    detect_coinjoin,
    multi_input_cluster,
    trace_flows,
)
from chaincase.statements import Predicate, Statement
from chaincase.schemes import (
    SCHEME_CATALOG,
    answer_cq,
    auto_instantiate,
    instantiate,
    list_open_cqs,
)
from chaincase.afcore import build_framework, grounded_labelling, complete_labellings
from chaincase.casefile import CaseFile, load_case, save_case
from chaincase.report import generate_report, render_markdown

__all__ = [
    "Outpoint",
    "Transaction",
    "TransactionSet",
    "TxOutput",
    "parse_chain_file",
    "validate_set",
    "HeuristicParams",
    "detect_change_output",
    "detect_coinjoin",
    "multi_input_cluster",
    "trace_flows",
    "Predicate",
    "Statement",
    "SCHEME_CATALOG",
    "instantiate",
    "auto_instantiate",
    "answer_cq",
    "list_open_cqs",
    "build_framework",
    "grounded_labelling",
    "complete_labellings",
    "CaseFile",
    "load_case",
    "save_case",
    "generate_report",
    "render_markdown",
]
