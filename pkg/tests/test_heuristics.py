"""CoinJoin detection, clustering, change detection, and flow tracing."""

import json
import random

import pytest

from chaincase import demo_case
from chaincase.chain import parse_chain_file
from chaincase.heuristics import (
    HeuristicParams,
    detect_change_output,
    detect_coinjoin,
    multi_input_cluster,
    trace_flows,
)

from oracles import random_chain


def build(*txs):
    return parse_chain_file(json.dumps({"transactions": list(txs)}))


def coinbase(txid, outputs):
    return {"txid": txid, "coinbase": True, "inputs": [],
            "outputs": [{"address": a, "value_sat": v} for a, v in outputs]}


def spend(txid, inputs, outputs):
    return {"txid": txid, "coinbase": False,
            "inputs": [{"txid": t, "vout": v} for t, v in inputs],
            "outputs": [{"address": a, "value_sat": v} for a, v in outputs]}


@pytest.fixture(scope="module")
def fixture_chain():
    return parse_chain_file(json.dumps(demo_case.chain_json_obj()))


# -- params ------------------------------------------------------------------

def test_params_reject_low_thresholds():
    with pytest.raises(ValueError):
        HeuristicParams(coinjoin_min_equal_outputs=1)
    with pytest.raises(ValueError):
        HeuristicParams(coinjoin_min_inputs=0)


# -- CoinJoin ---------------------------------------------------------------

def test_coinjoin_detected_on_equal_outputs():
    ts = build(
        coinbase("cb", [("a", 100_000_000), ("b", 100_000_000), ("c", 40_000_000)]),
        spend("cj", [("cb", 0), ("cb", 1), ("cb", 2)],
              [("x", 100_000_000), ("y", 100_000_000), ("z", 30_000_000)]),
    )
    check = detect_coinjoin(ts.get("cj"), ts)
    assert check
    assert "100000000" in check.reason
    assert "3 inputs" in check.reason
    assert "2 times" in check.reason


def test_coinjoin_needs_enough_inputs():
    ts = build(
        coinbase("cb", [("a", 10)]),
        spend("s", [("cb", 0)], [("x", 5), ("y", 5)]),
    )
    assert not detect_coinjoin(ts.get("s"), ts)


def test_coinjoin_needs_repeated_value():
    ts = build(
        coinbase("cb", [("a", 10), ("b", 10), ("c", 10), ("d", 10)]),
        spend("s", [("cb", 0), ("cb", 1), ("cb", 2), ("cb", 3)],
              [("w", 1), ("x", 2), ("y", 3), ("z", 4)]),
    )
    assert not detect_coinjoin(ts.get("s"), ts)


def test_coinjoin_threshold_tightening():
    ts = build(
        coinbase("cb", [("a", 10), ("b", 10)]),
        spend("s", [("cb", 0), ("cb", 1)], [("x", 6), ("y", 6), ("z", 8)]),
    )
    assert detect_coinjoin(ts.get("s"), ts)
    strict = HeuristicParams(coinjoin_min_equal_outputs=3)
    assert not detect_coinjoin(ts.get("s"), ts, strict)
    ts3 = build(
        coinbase("cb", [("a", 10), ("b", 10)]),
        spend("s", [("cb", 0), ("cb", 1)], [("x", 6), ("y", 6), ("z", 6)]),
    )
    assert detect_coinjoin(ts3.get("s"), ts3, strict)


def test_fixture_mix_tx_is_coinjoin_shaped(fixture_chain):
    check = detect_coinjoin(fixture_chain.get("tx-mix"), fixture_chain)
    assert check
    assert check.reason == "2 inputs and output value 95000000 sat occurring 2 times"


# -- clustering ---------------------------------------------------------------

def cospend_chain():
    return build(
        coinbase("cb", [("a", 10), ("b", 10), ("b", 5), ("c", 10), ("d", 10)]),
        spend("t1", [("cb", 0), ("cb", 1)], [("p", 9), ("q", 5)]),
        spend("t2", [("cb", 2), ("cb", 3)], [("r", 14)]),
    )


def test_transitive_closure_of_cospending():
    part = multi_input_cluster(cospend_chain())
    assert part.cluster_of("a") == frozenset({"a", "b", "c"})
    assert part.cluster_of("d") == frozenset({"d"})


def test_partition_covers_all_addresses():
    ts = cospend_chain()
    part = multi_input_cluster(ts)
    united = set().union(*part.clusters)
    assert united == set(ts.addresses())
    assert sum(len(c) for c in part.clusters) == len(united)


def test_coinjoin_filter_example():
    # {a,b} and {b,c} co-spends plus a CoinJoin-shaped {c,d} spend.
    txs = [
        coinbase("cb", [("a", 10), ("b", 10), ("b", 5), ("c", 10),
                        ("c", 5), ("d", 10)]),
        spend("t1", [("cb", 0), ("cb", 1)], [("p", 9)]),
        spend("t2", [("cb", 2), ("cb", 3)], [("q", 9)]),
        spend("cj", [("cb", 4), ("cb", 5)], [("x", 7), ("y", 7)]),
    ]
    ts = build(*txs)
    with_filter = multi_input_cluster(ts)
    assert with_filter.cluster_of("a") == frozenset({"a", "b", "c"})
    assert with_filter.cluster_of("d") == frozenset({"d"})
    without = multi_input_cluster(ts, HeuristicParams(apply_coinjoin_filter=False))
    assert without.cluster_of("d") == frozenset({"a", "b", "c", "d"})
    assert with_filter.refines(without)


def test_merge_provenance_cites_cospending_tx():
    ts = cospend_chain()
    part = multi_input_cluster(ts)
    assert part.provenance
    for merge in part.provenance:
        tx = ts.get(merge.txid)
        addresses = set(ts.input_addresses(tx))
        assert merge.address_a in addresses
        assert merge.address_b in addresses


def test_clustering_idempotent_and_deterministic():
    rng = random.Random(99)
    _, ts = random_chain(rng, max_txs=60, max_addresses=60)
    first = multi_input_cluster(ts)
    second = multi_input_cluster(ts)
    assert first.clusters == second.clusters
    assert first.provenance == second.provenance
    assert dict(first.cluster_id) == dict(second.cluster_id)


def test_cluster_id_is_consistent():
    _, ts = random_chain(random.Random(4), max_txs=40, max_addresses=40)
    part = multi_input_cluster(ts)
    for idx, cluster in enumerate(part.clusters):
        for address in cluster:
            assert part.cluster_id[address] == idx


def test_fixture_clusters(fixture_chain):
    part = multi_input_cluster(fixture_chain)
    # tx-fund-w1 co-spends two W2 payout outputs.
    assert part.cluster_of("addr-w2-a") == frozenset({"addr-w2-a", "addr-w2-b"})
    # The mix transaction is CoinJoin shaped, so its inputs stay apart.
    assert part.cluster_of("addr-w1-a") == frozenset({"addr-w1-a"})
    unfiltered = multi_input_cluster(
        fixture_chain, HeuristicParams(apply_coinjoin_filter=False))
    assert unfiltered.cluster_of("addr-w1-a") == frozenset(
        {"addr-w1-a", "addr-mixer-pool"})
    assert part.refines(unfiltered)


# -- change detection ---------------------------------------------------------

def test_change_detected_for_unique_fresh_address():
    ts = build(
        coinbase("cb", [("reused", 100)]),
        spend("s", [("cb", 0)], [("fresh1", 70), ("reused", 30)]),
    )
    result = detect_change_output(ts.get("s"), ts)
    assert result is not None
    assert result.vout == 0
    assert result.address == "fresh1"
    assert "fresh1" in result.reason and "reused" in result.reason


def test_change_ambiguous_when_both_fresh():
    ts = build(
        coinbase("cb", [("reused", 100)]),
        spend("s", [("cb", 0)], [("fresh1", 70), ("fresh2", 30)]),
    )
    assert detect_change_output(ts.get("s"), ts) is None


def test_change_none_when_all_reused():
    ts = build(
        coinbase("cb", [("x", 50), ("y", 50)]),
        spend("s", [("cb", 0), ("cb", 1)], [("x", 40), ("y", 60)]),
    )
    assert detect_change_output(ts.get("s"), ts) is None


def test_change_skips_coinbase_and_single_output():
    ts = build(
        coinbase("cb", [("x", 50), ("y", 50)]),
        spend("s", [("cb", 0)], [("z", 50)]),
    )
    assert detect_change_output(ts.get("cb"), ts) is None
    assert detect_change_output(ts.get("s"), ts) is None


def test_change_detection_disabled_by_params():
    ts = build(
        coinbase("cb", [("reused", 100)]),
        spend("s", [("cb", 0)], [("fresh1", 70), ("reused", 30)]),
    )
    off = HeuristicParams(change_requires_fresh_address=False)
    assert detect_change_output(ts.get("s"), ts, off) is None


def test_change_never_returns_previously_seen_address():
    rng = random.Random(314)
    for _ in range(15):
        _, ts = random_chain(rng, max_txs=50, max_addresses=25)
        for idx, tx in enumerate(ts.transactions):
            result = detect_change_output(tx, ts)
            if result is None:
                continue
            earlier = {out.address
                       for early in ts.transactions[:idx] for out in early.outputs}
            assert result.address not in earlier
            others = {out.address for i, out in enumerate(tx.outputs)
                      if i != result.vout}
            assert others <= earlier


def test_fixture_change_output(fixture_chain):
    # The W2 -> W1 funding tx pays change back to a fresh W2 address.
    result = detect_change_output(fixture_chain.get("tx-fund-w1"), fixture_chain)
    assert result is not None
    assert result.address == "addr-w2-c"
    assert result.vout == 1


# -- flow tracing --------------------------------------------------------------

def test_trace_rejects_bad_hop_budget():
    ts = cospend_chain()
    with pytest.raises(ValueError):
        trace_flows(ts, {"a"}, {"p"}, 0)


def test_trace_direct_payment():
    ts = build(
        coinbase("cb", [("a", 10)]),
        spend("s", [("cb", 0)], [("b", 10)]),
    )
    assert trace_flows(ts, {"a"}, {"b"}, 3) == (("s",),)


def test_trace_no_connection():
    ts = build(
        coinbase("cb", [("a", 10), ("b", 10)]),
        spend("s", [("cb", 0)], [("c", 10)]),
    )
    assert trace_flows(ts, {"a"}, {"b"}, 4) == ()


def test_trace_respects_hop_budget():
    ts = build(
        coinbase("cb", [("a", 10)]),
        spend("h1", [("cb", 0)], [("m", 10)]),
        spend("h2", [("h1", 0)], [("b", 10)]),
    )
    assert trace_flows(ts, {"a"}, {"b"}, 1) == ()
    assert trace_flows(ts, {"a"}, {"b"}, 2) == (("h1", "h2"),)


def test_trace_orders_paths_lexicographically():
    ts = build(
        coinbase("cb", [("a", 10), ("a", 10)]),
        spend("t2", [("cb", 0)], [("b", 10)]),
        spend("t1", [("cb", 1)], [("b", 10)]),
    )
    assert trace_flows(ts, {"a"}, {"b"}, 2) == (("t1",), ("t2",))


def test_fixture_flow_paths(fixture_chain):
    w2 = set(demo_case.W2)
    assert ("tx-fund-w1",) in trace_flows(fixture_chain, w2, {demo_case.W1}, 1)
    assert ("tx-fund-w4",) in trace_flows(fixture_chain, w2,
                                          {demo_case.W4[0]}, 1)
    assert trace_flows(fixture_chain, {demo_case.W1},
                       {demo_case.MIXER_EXITS[0]}, 1) == (("tx-mix",),)
    # Two hops: W2 payout change -> W4 -> game company deposit.
    assert trace_flows(fixture_chain, {"addr-w2-c"},
                       {demo_case.GAME_DEPOSIT}, 2) == (("tx-fund-w4", "tx-game-w4"),)
