"""Address-clustering heuristics over a TransactionSet.

The multi-input heuristic drives clustering: all resolved input addresses
of one transaction are presumed to share a controller. CoinJoin-looking
transactions are excluded from merging by default because they are the
classic false-positive source for that presumption. Every merge keeps the
txid that justified it so downstream reports can cite their provenance.

Change detection implements the fresh-address variant only: the unique
output whose address is new to the whole set while every sibling output
address has been seen before.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from chaincase.chain import Transaction, TransactionSet


@dataclass(frozen=True)
class HeuristicParams:
    """Tuning knobs for the heuristics; integer thresholds must be >= 2.

    change_requires_fresh_address gates change detection as a whole: the
    detector's only implemented criterion presumes wallet software that
    derives a fresh change address per transaction, so turning the
    assumption off disables detection rather than guessing by other means.
    """

    coinjoin_min_equal_outputs: int = 2
    coinjoin_min_inputs: int = 2
    apply_coinjoin_filter: bool = True
    change_requires_fresh_address: bool = True

    def __post_init__(self):
        if self.coinjoin_min_equal_outputs < 2:
            raise ValueError("coinjoin_min_equal_outputs must be >= 2")
        if self.coinjoin_min_inputs < 2:
            raise ValueError("coinjoin_min_inputs must be >= 2")


@dataclass(frozen=True)
class CoinJoinCheck:
    is_coinjoin: bool
    reason: str

    def __bool__(self) -> bool:
        return self.is_coinjoin


def detect_coinjoin(tx: Transaction, ts: TransactionSet,
                    params: HeuristicParams = HeuristicParams()) -> CoinJoinCheck:
    """Flag transactions that look like CoinJoin mixes.

    A transaction qualifies when it has at least ``coinjoin_min_inputs``
    inputs and some output value occurs at least
    ``coinjoin_min_equal_outputs`` times.
    """
    n_inputs = len(tx.inputs)
    if n_inputs < params.coinjoin_min_inputs:
        return CoinJoinCheck(False, f"only {n_inputs} input(s), "
                                    f"threshold is {params.coinjoin_min_inputs}")
    counts = Counter(out.value_sat for out in tx.outputs)
    repeated = [(value, n) for value, n in counts.items()
                if n >= params.coinjoin_min_equal_outputs]
    if not repeated:
        return CoinJoinCheck(False, "no output value repeated "
                                    f"{params.coinjoin_min_equal_outputs} or more times")
    value, n = max(repeated, key=lambda pair: (pair[1], pair[0]))
    return CoinJoinCheck(True, f"{n_inputs} inputs and output value {value} sat "
                               f"occurring {n} times")


@dataclass(frozen=True)
class MergeRecord:
    """One union of two addresses, justified by a co-spending transaction."""

    txid: str
    address_a: str
    address_b: str


@dataclass(frozen=True)
class ClusterPartition:
    clusters: tuple[frozenset[str], ...]
    cluster_id: Mapping[str, int]
    provenance: tuple[MergeRecord, ...]

    def cluster_of(self, address: str) -> frozenset[str]:
        return self.clusters[self.cluster_id[address]]

    def refines(self, other: "ClusterPartition") -> bool:
        """True when every cluster here is contained in some cluster of other."""
        return all(
            any(cluster <= coarse for coarse in other.clusters)
            for cluster in self.clusters
        )


class _UnionFind:
    # Path compression plus union by size; records nothing itself.

    def __init__(self, items: Iterable[str]):
        self.parent = {item: item for item in items}
        self.size = {item: 1 for item in self.parent}

    def find(self, item: str) -> str:
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a: str, b: str) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


def multi_input_cluster(ts: TransactionSet,
                        params: HeuristicParams = HeuristicParams()) -> ClusterPartition:
    """Partition all addresses of the set by the multi-input heuristic.

    Addresses co-spent by one transaction are merged; with
    ``apply_coinjoin_filter`` enabled, transactions flagged by
    ``detect_coinjoin`` contribute no merges. Addresses appearing only in
    outputs stay singletons. Cluster ids are assigned deterministically by
    the lexicographically smallest member.
    """
    universe = ts.addresses()
    uf = _UnionFind(universe)
    merges: list[MergeRecord] = []

    for tx in ts.transactions:
        if tx.is_coinbase or len(tx.inputs) < 2:
            continue
        if params.apply_coinjoin_filter and detect_coinjoin(tx, ts, params):
            continue
        addrs = ts.input_addresses(tx)
        first = addrs[0]
        for other in addrs[1:]:
            if uf.union(first, other):
                a, b = sorted((first, other))
                merges.append(MergeRecord(tx.txid, a, b))

    groups: dict[str, set[str]] = {}
    for address in universe:
        groups.setdefault(uf.find(address), set()).add(address)
    clusters = tuple(sorted((frozenset(g) for g in groups.values()), key=min))
    cluster_id = {address: idx for idx, cluster in enumerate(clusters) for address in cluster}
    return ClusterPartition(clusters, cluster_id, tuple(merges))


@dataclass(frozen=True)
class ChangeResult:
    vout: int
    address: str
    reason: str


def detect_change_output(tx: Transaction, ts: TransactionSet,
                         params: HeuristicParams = HeuristicParams()) -> ChangeResult | None:
    """Find the change output of a transaction by address freshness.

    Returns the unique output index whose address never appears anywhere
    in the set before the transaction while every other output address has
    appeared before; returns None when zero or several candidates qualify,
    when the transaction is coinbase or has fewer than two outputs, or when
    the fresh-address assumption is disabled in the params. No guessing.
    """
    if not params.change_requires_fresh_address:
        return None
    if tx.is_coinbase or len(tx.outputs) < 2:
        return None

    position = ts.position(tx.txid)
    first_seen: dict[str, int] = {}
    for idx, earlier in enumerate(ts.transactions[:position]):
        for out in earlier.outputs:
            first_seen.setdefault(out.address, idx)

    seen_before = [out.address in first_seen for out in tx.outputs]
    candidates = [
        i for i in range(len(tx.outputs))
        if not seen_before[i]
        and all(seen_before[j] for j in range(len(tx.outputs)) if j != i)
    ]
    if len(candidates) != 1:
        return None
    vout = candidates[0]
    address = tx.outputs[vout].address
    others = sorted({out.address for i, out in enumerate(tx.outputs) if i != vout})
    return ChangeResult(
        vout, address,
        f"address {address!r} is new to the set while previously seen "
        f"addresses {others} receive the remaining outputs",
    )


def trace_flows(ts: TransactionSet, from_addresses: Iterable[str],
                to_addresses: Iterable[str], max_hops: int) -> tuple[tuple[str, ...], ...]:
    """Enumerate acyclic transaction paths from one address set to another.

    A path is a sequence of at most ``max_hops`` transactions where the
    first spends from ``from_addresses``, the last pays into
    ``to_addresses``, and each subsequent transaction spends an output
    created by its predecessor. Paths are returned sorted lexicographically
    by their txid sequence.
    """
    if max_hops < 1:
        raise ValueError("max_hops must be >= 1")
    src = frozenset(from_addresses)
    dst = frozenset(to_addresses)

    spends_from: dict[str, list[Transaction]] = {}
    for tx in ts.transactions:
        for op in tx.inputs:
            spends_from.setdefault(op.txid, []).append(tx)

    def pays_into(tx: Transaction) -> bool:
        return any(out.address in dst for out in tx.outputs)

    starts = [
        tx for tx in ts.transactions
        if not tx.is_coinbase and any(addr in src for addr in ts.input_addresses(tx))
    ]

    paths: list[tuple[str, ...]] = []

    def walk(tx: Transaction, trail: tuple[str, ...]):
        trail = trail + (tx.txid,)
        if pays_into(tx):
            paths.append(trail)
        if len(trail) >= max_hops:
            return
        for nxt in spends_from.get(tx.txid, ()):
            if nxt.txid not in trail:
                walk(nxt, trail)

    for start in starts:
        walk(start, ())
    return tuple(sorted(paths))
