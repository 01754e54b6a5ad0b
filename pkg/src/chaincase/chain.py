"""UTXO transaction-graph model.

Transactions live in a confirmation-ordered set. Inputs reference earlier
outputs by (txid, vout); coinbase transactions mint value out of nothing.
All values are integral satoshi (1 BTC = 100,000,000 sat), so no floats
ever enter fee arithmetic.

Parsing is strict about schema (field names, types, reference validity)
while semantic problems such as double spends or negative fees are left to
``validate_set``, which reports findings instead of throwing. That split
keeps the validator usable on programmatically built sets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

SATOSHI_PER_BTC = 100_000_000

AddressRole = str  # "input" | "output"


class ChainError(Exception):
    """Base class for chain-model errors."""


class ChainParseError(ChainError):
    """Malformed JSON; carries the line/column of the failure."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class ChainSchemaError(ChainError):
    """Structurally invalid chain data; names the offending txid/field."""

    def __init__(self, message: str, txid: str | None = None, field: str | None = None):
        super().__init__(message)
        self.txid = txid
        self.field = field


class UnknownOutpointError(ChainError, LookupError):
    """An outpoint that does not resolve to any output in the set."""


@dataclass(frozen=True)
class Outpoint:
    txid: str
    vout: int


@dataclass(frozen=True)
class TxOutput:
    address: str
    value_sat: int


@dataclass(frozen=True)
class Transaction:
    txid: str
    inputs: tuple[Outpoint, ...]
    outputs: tuple[TxOutput, ...]
    is_coinbase: bool = False

    def output_addresses(self) -> tuple[str, ...]:
        return tuple(out.address for out in self.outputs)


class TransactionSet:
    """An ordered, indexed collection of transactions.

    Order is confirmation order (file order). The set is immutable after
    construction and safe to share. Construction itself does not verify
    reference validity so that ``validate_set`` can inspect broken sets;
    ``parse_chain_file`` layers the strict checks on top.
    """

    def __init__(self, transactions: Iterable[Transaction]):
        self.transactions: tuple[Transaction, ...] = tuple(transactions)
        self._position: dict[str, int] = {}
        self._outputs: dict[Outpoint, TxOutput] = {}
        for idx, tx in enumerate(self.transactions):
            if tx.txid in self._position:
                raise ChainSchemaError(f"duplicate txid {tx.txid!r}", txid=tx.txid, field="txid")
            self._position[tx.txid] = idx
            for vout, out in enumerate(tx.outputs):
                self._outputs[Outpoint(tx.txid, vout)] = out
        self._appearances: dict[str, set[tuple[str, AddressRole]]] = {}
        for tx in self.transactions:
            for out in tx.outputs:
                self._appearances.setdefault(out.address, set()).add((tx.txid, "output"))
            for op in tx.inputs:
                resolved = self._outputs.get(op)
                if resolved is not None:
                    self._appearances.setdefault(resolved.address, set()).add((tx.txid, "input"))

    def __len__(self) -> int:
        return len(self.transactions)

    def __contains__(self, txid: str) -> bool:
        return txid in self._position

    def __iter__(self):
        return iter(self.transactions)

    def get(self, txid: str) -> Transaction:
        try:
            return self.transactions[self._position[txid]]
        except KeyError:
            raise UnknownOutpointError(f"unknown transaction {txid!r}") from None

    def position(self, txid: str) -> int:
        return self._position[txid]

    def resolve(self, outpoint: Outpoint) -> TxOutput:
        """Return the output an outpoint references, or raise UnknownOutpointError."""
        try:
            return self._outputs[outpoint]
        except KeyError:
            raise UnknownOutpointError(
                f"outpoint ({outpoint.txid}, {outpoint.vout}) does not resolve"
            ) from None

    def input_addresses(self, tx: Transaction) -> tuple[str, ...]:
        """Resolved input addresses of a transaction, in input order."""
        return tuple(self.resolve(op).address for op in tx.inputs)

    def addresses(self) -> tuple[str, ...]:
        """All addresses appearing in the set, sorted."""
        return tuple(sorted(self._appearances))

    def appearances(self, address: str) -> frozenset[tuple[str, AddressRole]]:
        """(txid, role) appearances of an address; role is "input" or "output"."""
        return frozenset(self._appearances.get(address, ()))

    def to_json_obj(self) -> dict:
        return {
            "transactions": [
                {
                    "txid": tx.txid,
                    "coinbase": tx.is_coinbase,
                    "inputs": [{"txid": op.txid, "vout": op.vout} for op in tx.inputs],
                    "outputs": [
                        {"address": out.address, "value_sat": out.value_sat}
                        for out in tx.outputs
                    ],
                }
                for tx in self.transactions
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=False)


def _require_keys(obj: Mapping, allowed: set[str], required: set[str], where: str, txid: str | None):
    unknown = set(obj) - allowed
    if unknown:
        raise ChainSchemaError(
            f"unknown field(s) {sorted(unknown)} in {where}", txid=txid, field=sorted(unknown)[0]
        )
    missing = required - set(obj)
    if missing:
        raise ChainSchemaError(
            f"missing field(s) {sorted(missing)} in {where}", txid=txid, field=sorted(missing)[0]
        )


def _parse_transaction(obj: object, index: int) -> Transaction:
    where = f"transaction #{index}"
    if not isinstance(obj, dict):
        raise ChainSchemaError(f"{where} is not an object")
    txid = obj.get("txid")
    if not isinstance(txid, str) or not txid:
        raise ChainSchemaError(f"{where}: txid must be a non-empty string", field="txid")
    where = f"transaction {txid!r}"
    _require_keys(obj, {"txid", "coinbase", "inputs", "outputs"},
                  {"txid", "coinbase", "inputs", "outputs"}, where, txid)
    coinbase = obj["coinbase"]
    if not isinstance(coinbase, bool):
        raise ChainSchemaError(f"{where}: coinbase must be a boolean", txid=txid, field="coinbase")
    raw_inputs = obj["inputs"]
    raw_outputs = obj["outputs"]
    if not isinstance(raw_inputs, list) or not isinstance(raw_outputs, list):
        raise ChainSchemaError(f"{where}: inputs/outputs must be arrays", txid=txid, field="inputs")

    inputs = []
    for i, inp in enumerate(raw_inputs):
        if not isinstance(inp, dict):
            raise ChainSchemaError(f"{where}: input #{i} is not an object", txid=txid, field="inputs")
        _require_keys(inp, {"txid", "vout"}, {"txid", "vout"}, f"{where} input #{i}", txid)
        ref_txid, vout = inp["txid"], inp["vout"]
        if not isinstance(ref_txid, str) or not ref_txid:
            raise ChainSchemaError(f"{where}: input #{i} txid invalid", txid=txid, field="inputs")
        if not isinstance(vout, int) or isinstance(vout, bool) or vout < 0:
            raise ChainSchemaError(
                f"{where}: input #{i} vout must be a non-negative integer",
                txid=txid, field="inputs",
            )
        inputs.append(Outpoint(ref_txid, vout))

    outputs = []
    for i, out in enumerate(raw_outputs):
        if not isinstance(out, dict):
            raise ChainSchemaError(f"{where}: output #{i} is not an object", txid=txid, field="outputs")
        _require_keys(out, {"address", "value_sat"}, {"address", "value_sat"}, f"{where} output #{i}", txid)
        address, value = out["address"], out["value_sat"]
        if not isinstance(address, str) or not address:
            raise ChainSchemaError(f"{where}: output #{i} address invalid", txid=txid, field="outputs")
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise ChainSchemaError(
                f"{where}: output #{i} value_sat must be a non-negative integer",
                txid=txid, field="outputs",
            )
        outputs.append(TxOutput(address, value))

    if coinbase and inputs:
        raise ChainSchemaError(f"{where}: coinbase transaction must have no inputs",
                               txid=txid, field="inputs")
    if not coinbase and not inputs:
        raise ChainSchemaError(f"{where}: non-coinbase transaction needs at least one input",
                               txid=txid, field="inputs")
    if not coinbase and not outputs:
        raise ChainSchemaError(f"{where}: non-coinbase transaction needs at least one output",
                               txid=txid, field="outputs")
    return Transaction(txid, tuple(inputs), tuple(outputs), coinbase)


def parse_chain_file(raw: str | bytes) -> TransactionSet:
    """Parse a chain file into a TransactionSet.

    Malformed JSON raises ChainParseError with line/column; schema
    violations (missing/unknown fields, bad types, negative values,
    references to missing or later transactions, out-of-range vouts)
    raise ChainSchemaError naming the offending txid and field.
    """
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ChainParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno, column=exc.colno,
        ) from exc
    if not isinstance(doc, dict):
        raise ChainSchemaError("top-level value must be an object")
    _require_keys(doc, {"transactions"}, {"transactions"}, "chain file", None)
    if not isinstance(doc["transactions"], list):
        raise ChainSchemaError("'transactions' must be an array", field="transactions")

    txs = [_parse_transaction(entry, i) for i, entry in enumerate(doc["transactions"])]
    ts = TransactionSet(txs)

    # References must point at existing, earlier outputs. Double spends are
    # representable on purpose; validate_set reports them.
    for idx, tx in enumerate(ts.transactions):
        for i, op in enumerate(tx.inputs):
            if op.txid not in ts:
                raise ChainSchemaError(
                    f"transaction {tx.txid!r}: input #{i} references unknown transaction {op.txid!r}",
                    txid=tx.txid, field="inputs",
                )
            if ts.position(op.txid) >= idx:
                raise ChainSchemaError(
                    f"transaction {tx.txid!r}: input #{i} references {op.txid!r} "
                    "which does not precede it",
                    txid=tx.txid, field="inputs",
                )
            if op.vout >= len(ts.get(op.txid).outputs):
                raise ChainSchemaError(
                    f"transaction {tx.txid!r}: input #{i} references output "
                    f"({op.txid}, {op.vout}) which does not exist",
                    txid=tx.txid, field="inputs",
                )
    return ts


def resolve_input(ts: TransactionSet, outpoint: Outpoint) -> tuple[str, int]:
    """Resolve an outpoint to (address, value_sat)."""
    out = ts.resolve(outpoint)
    return out.address, out.value_sat


class FindingKind(str, Enum):
    DANGLING_OUTPOINT = "dangling-outpoint"
    DOUBLE_SPEND = "double-spend"
    NEGATIVE_FEE = "negative-fee"


@dataclass(frozen=True)
class ValidationFinding:
    kind: FindingKind
    txid: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[ValidationFinding, ...]
    fees: Mapping[str, int | None]  # per non-coinbase tx; None when inputs do not resolve

    @property
    def ok(self) -> bool:
        return not self.findings


def validate_set(ts: TransactionSet) -> ValidationReport:
    """Check referential and value integrity; returns findings, never throws.

    Flags raised per transaction: dangling outpoints (unknown txid,
    out-of-range vout, or reference to a non-earlier transaction), double
    spends (flagged on the later spender), and negative fees. A set is
    valid exactly when there are no findings.
    """
    findings: list[ValidationFinding] = []
    fees: dict[str, int | None] = {}
    spent_by: dict[Outpoint, str] = {}

    for idx, tx in enumerate(ts.transactions):
        unresolved = False
        input_total = 0
        for i, op in enumerate(tx.inputs):
            dangling = None
            if op.txid not in ts:
                dangling = f"input #{i} references unknown transaction {op.txid!r}"
            elif op.vout >= len(ts.get(op.txid).outputs):
                dangling = f"input #{i} references missing output ({op.txid}, {op.vout})"
            elif ts.position(op.txid) >= idx:
                dangling = (
                    f"input #{i} references ({op.txid}, {op.vout}) "
                    "which does not precede the spender"
                )
            if dangling:
                findings.append(ValidationFinding(FindingKind.DANGLING_OUTPOINT, tx.txid, dangling))
                unresolved = True
                continue
            if op in spent_by:
                findings.append(ValidationFinding(
                    FindingKind.DOUBLE_SPEND, tx.txid,
                    f"input #{i} respends ({op.txid}, {op.vout}) already spent by {spent_by[op]!r}",
                ))
            else:
                spent_by[op] = tx.txid
            input_total += ts.resolve(op).value_sat

        if tx.is_coinbase:
            continue
        if unresolved:
            fees[tx.txid] = None
            continue
        fee = input_total - sum(out.value_sat for out in tx.outputs)
        fees[tx.txid] = fee
        if fee < 0:
            findings.append(ValidationFinding(
                FindingKind.NEGATIVE_FEE, tx.txid,
                f"outputs exceed inputs by {-fee} sat",
            ))

    return ValidationReport(tuple(findings), fees)


def unspent_outpoints(ts: TransactionSet) -> dict[Outpoint, TxOutput]:
    """The UTXO view of the set: outputs never referenced by any input."""
    spent = {op for tx in ts.transactions for op in tx.inputs}
    return {op: out for op, out in ts._outputs.items() if op not in spent}
