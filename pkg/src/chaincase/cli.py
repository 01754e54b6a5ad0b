"""Command-line front door; every service capability without the HTTP layer.

Machine-consumable results go to stdout (JSON with sorted keys, or plain
tables), diagnostics to stderr. Exit codes: 0 success, 1 domain error,
2 usage error. Output is deterministic for fixed inputs: no timestamps, no
randomness, no color codes.
"""

from __future__ import annotations

import argparse
import json
import sys

from chaincase import afcore
from chaincase.casefile import CaseError, load_case, new_case, save_case
from chaincase.chain import ChainError, validate_set
from chaincase.payloads import clusters_payload, cqs_payload, evaluation_payload
from chaincase.report import generate_report, render_markdown, report_json
from chaincase.schemes import SchemeError, answer_cq, auto_instantiate
from chaincase.statements import StatementError


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _load(path: str):
    return load_case(path)


def cmd_ingest(args) -> int:
    with open(args.chain, "rb") as handle:
        raw = handle.read()
    chain_obj = json.loads(raw)
    case_id = args.case_id or "case"
    case = new_case(case_id, chain_embedded=chain_obj)
    save_case(case, args.out)
    _dump({
        "case_id": case.case_id,
        "path": args.out,
        "transactions": len(case.chain_set()),
    })
    return 0


def cmd_validate(args) -> int:
    case = _load(args.case)
    report = validate_set(case.chain_set())
    _dump({
        "ok": report.ok,
        "findings": [
            {"kind": f.kind.value, "txid": f.txid, "detail": f.detail}
            for f in report.findings
        ],
        "fees": dict(sorted(report.fees.items())),
    })
    # A set with findings is not a usage error but a failed validation.
    return 0 if report.ok else 1


def cmd_cluster(args) -> int:
    case = _load(args.case)
    _dump(clusters_payload(case, apply_filter=not args.no_coinjoin_filter))
    return 0


def cmd_auto_args(args) -> int:
    case = _load(args.case)
    added = auto_instantiate(case)
    save_case(case, args.case)
    labelling = case.evaluate().labelling
    _dump({"added": [
        {
            "arg_id": arg.arg_id,
            "scheme_id": arg.scheme_id,
            "conclusion": arg.conclusion.render(),
            "label": labelling.get(arg.arg_id),
        }
        for arg in added
    ]})
    return 0


def cmd_cq_list(args) -> int:
    case = _load(args.case)
    _dump({"cqs": cqs_payload(case, args.status)})
    return 0


def cmd_cq_answer(args) -> int:
    case = _load(args.case)
    arg = answer_cq(case, args.arg, args.cq, args.answer, args.why)
    save_case(case, args.case)
    evaluation = case.evaluate()
    _dump({
        "arg_id": arg.arg_id,
        "cq_id": args.cq,
        "state": arg.cq_status(args.cq).state.value,
        "statements": dict(evaluation.statement_statuses),
    })
    return 0


def cmd_evaluate(args) -> int:
    case = _load(args.case)
    if args.semantics == "complete":
        framework = case.evaluate().framework
        labellings = afcore.complete_labellings(framework)
        print(f"complete labellings: {len(labellings)}")
        for labelling in labellings:
            print(json.dumps(labelling, sort_keys=True))
        return 0
    evaluation = case.evaluate()
    for arg in case.arguments:
        print(f"{evaluation.labelling[arg.arg_id]}\targument\t{arg.arg_id}")
    for statement, status in evaluation.statement_statuses.items():
        print(f"{status}\tstatement\t{statement}")
    return 0


def cmd_report(args) -> int:
    case = _load(args.case)
    report = generate_report(case)
    if args.format == "md":
        print(render_markdown(report))
    else:
        sys.stdout.write(report_json(report))
    return 0


def cmd_export_af(args) -> int:
    case = _load(args.case)
    framework = case.evaluate().framework
    sys.stdout.write(afcore.to_apx(framework))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from chaincase.service import CaseStore, create_app

    store = CaseStore(args.case_dir)
    app = create_app(store, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_demo(args) -> int:
    from chaincase.demo_case import write_fixture

    chain_path, case_path = write_fixture(args.out)
    _dump({"chain": chain_path, "case": case_path})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaincase",
        description="evidential reasoning over UTXO chains: clustering "
                    "heuristics, argumentation schemes, and case evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="create a case file from a chain file")
    p.add_argument("--chain", required=True, help="chain JSON file")
    p.add_argument("--out", required=True, help="case file to write")
    p.add_argument("--case-id", default=None, help="case id (default: 'case')")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("validate",
                       help="check the case's chain; exits 1 if findings exist")
    p.add_argument("--case", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("cluster", help="multi-input clustering of the case's chain")
    p.add_argument("--case", required=True)
    p.add_argument("--no-coinjoin-filter", action="store_true",
                   help="also merge through CoinJoin-shaped transactions")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("auto-args",
                       help="instantiate clustering arguments the heuristics justify")
    p.add_argument("--case", required=True)
    p.set_defaults(func=cmd_auto_args)

    p = sub.add_parser("cq", help="list or answer critical questions")
    cq_sub = p.add_subparsers(dest="cq_command", required=True)
    q = cq_sub.add_parser("list", help="list critical questions")
    q.add_argument("--case", required=True)
    q.add_argument("--status", choices=["all", "open", "answered"], default="all")
    q.set_defaults(func=cmd_cq_list)
    q = cq_sub.add_parser("answer", help="answer one critical question")
    q.add_argument("--case", required=True)
    q.add_argument("--arg", required=True, help="argument id")
    q.add_argument("--cq", required=True, help="critical question id")
    q.add_argument("--answer", required=True, choices=["favourable", "unfavourable"])
    q.add_argument("--why", required=True, help="justification text")
    q.set_defaults(func=cmd_cq_answer)

    p = sub.add_parser("evaluate", help="compile, label, and print statuses")
    p.add_argument("--case", required=True)
    p.add_argument("--semantics", choices=["grounded", "complete"],
                   default="grounded")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="render the suspicion report")
    p.add_argument("--case", required=True)
    p.add_argument("--format", choices=["md", "json"], default="md")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("export-af", help="export the attack graph")
    p.add_argument("--case", required=True)
    p.add_argument("--format", choices=["apx"], default="apx")
    p.set_defaults(func=cmd_export_af)

    p = sub.add_parser("serve", help="run the REST service")
    p.add_argument("--case-dir", required=True, help="directory of case files")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", default=None,
                   help="serve a built single-page UI from this directory")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("demo", help="write the bundled demonstration fixture")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # Downstream consumer (e.g. head) closed the pipe; not an error.
        return 0
    except (ChainError, CaseError, SchemeError, StatementError,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
