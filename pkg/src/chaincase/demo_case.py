"""Bundled demonstration case: a darknet-marketplace attribution investigation.

The synthetic chain models a small investigation: payouts from a seized
marketplace vendor account fund a wallet cluster (W2), which funds further
wallets (W1, W4); W1 co-spends with a mixing service whose payout lands at
a payment processor; deposits at an online gaming company corroborate the
account holder's identity. Amounts are synthetic; the topology is what
matters.

Eleven arguments chain the evidence into one final conclusion: the
defendant is connected to the administration of the marketplace. All
assumption questions ship answered favourably with justifications;
exception and supportive questions stay open, so the bundled state
evaluates to IN with a presumptive report tier. Answering the CoinJoin
exception on the mixer co-spend unfavourably defeats the multi-input
argument and everything built on it.

Run ``python -m chaincase.demo_case --out DIR`` to write the fixture files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from chaincase.casefile import CaseFile, new_case, save_case
from chaincase.records import AttributionTag, Entity, EvidenceItem, Offence
from chaincase.schemes import answer_cq, auto_instantiate, instantiate
from chaincase.statements import Predicate, Statement, inputs_constant, quote

CASE_ID = "marketplace-takedown"
OFFENCE_ID = "offence-wsm-admin"

# Wallet addresses, grouped by their narrative role.
HANSA_HOT = "addr-hansa-hot"
HANSA_REST = "addr-hansa-rest"
W2 = ("addr-w2-a", "addr-w2-b", "addr-w2-c", "addr-w2-d")
W1 = "addr-w1-a"
W4 = ("addr-w4-a", "addr-w4-b")
W5 = ("addr-w5-a", "addr-w5-b")
ASSOC = ("addr-assoc-1", "addr-assoc-2")
MIXER_POOL = "addr-mixer-pool"
MIXER_EXITS = ("addr-mixer-exit-1", "addr-mixer-exit-2")
MIXER_FEE = "addr-mixer-fee"
BPPC_DEPOSIT = "addr-bppc-deposit"
GAME_DEPOSIT = "addr-game-deposit"


def _tx(txid: str, inputs, outputs, coinbase=False) -> dict:
    return {
        "txid": txid,
        "coinbase": coinbase,
        "inputs": [{"txid": t, "vout": v} for t, v in inputs],
        "outputs": [{"address": a, "value_sat": v} for a, v in outputs],
    }


def chain_json_obj() -> dict:
    """The demonstration chain: 11 transactions, self-contained."""
    return {"transactions": [
        _tx("tx-coinbase-hansa", [], [(HANSA_HOT, 200_000_000)], coinbase=True),
        _tx("tx-coinbase-pool", [],
            [(MIXER_POOL, 100_000_000), (MIXER_POOL, 97_000_000)], coinbase=True),
        _tx("tx-coinbase-assoc", [], [(ASSOC[0], 60_000_000)], coinbase=True),
        # Marketplace payout run: vendor payouts to W2, a small seed for W1,
        # and the market's own remainder.
        _tx("tx-hansa-payouts", [("tx-coinbase-hansa", 0)],
            [(W2[0], 90_000_000), (W2[1], 50_000_000), (W1, 5_000_000),
             (HANSA_REST, 54_000_000)]),
        # W2 co-spend funding W1; change returns to the fresh W2 address.
        _tx("tx-fund-w1", [("tx-hansa-payouts", 0), ("tx-hansa-payouts", 1)],
            [(W1, 100_000_000), (W2[2], 38_000_000)]),
        # The W2 change address funds W4.
        _tx("tx-fund-w4", [("tx-fund-w1", 1)],
            [(W4[0], 30_000_000), (W2[3], 7_500_000)]),
        # W1 co-spends with the mixer pool; two equal-valued exits make it
        # CoinJoin-shaped, so the clustering filter skips it.
        _tx("tx-mix", [("tx-fund-w1", 0), ("tx-coinbase-pool", 0)],
            [(MIXER_EXITS[0], 95_000_000), (MIXER_EXITS[1], 95_000_000),
             (MIXER_FEE, 9_000_000)]),
        # Mixer pool pays out to the payment processor.
        _tx("tx-pay-bppc", [("tx-coinbase-pool", 1)], [(BPPC_DEPOSIT, 96_000_000)]),
        # A separate strand: W5, later corroborating the gaming account.
        _tx("tx-fund-w5", [("tx-coinbase-assoc", 0)],
            [(W5[0], 45_000_000), (ASSOC[1], 14_500_000)]),
        _tx("tx-game-w4", [("tx-fund-w4", 0)],
            [(GAME_DEPOSIT, 29_000_000), (W4[1], 500_000)]),
        _tx("tx-game-w5", [("tx-fund-w5", 0)],
            [(GAME_DEPOSIT, 44_000_000), (W5[1], 500_000)]),
    ]}


def _controls(entity: str, address: str) -> Statement:
    return Statement(Predicate.CONTROLS, (entity, address))


def build_case(case_id: str = CASE_ID) -> CaseFile:
    """Assemble the full demonstration case, ready to evaluate."""
    case = new_case(case_id, chain_embedded=chain_json_obj())

    for entity in (
        Entity("theone", "TheOne (marketplace administrator moniker)", "person"),
        Entity("defendant-x", "Defendant X", "person"),
        Entity("dudebuy", "dudebuy (seized-market vendor account)", "person"),
        Entity("hansa", "Hansa Market (seized)", "marketplace"),
        Entity("wall-street-market", "Wall Street Market", "marketplace"),
        Entity("mixer-service", "Mixing service", "service"),
        Entity("bppc", "Bitcoin payment processing company", "service"),
        Entity("game-company", "Online gaming company", "service"),
        Entity("demix-tool", "Commercial de-mixing software", "software"),
    ):
        case.add_entity(entity)

    case.add_offence(Offence(OFFENCE_ID, "Administration of the Wall Street Market"))

    connected_w2a = Statement(Predicate.CONNECTED, (W2[0], OFFENCE_ID))
    connected_w1 = Statement(Predicate.CONNECTED, (W1, OFFENCE_ID))
    controls_w2_inputs = _controls("theone", inputs_constant("tx-fund-w1"))

    for item in (
        EvidenceItem("ev-hansa-link", connected_w2a, "seized market backend",
                     "payout address of vendor dudebuy, whose PGP key matches the "
                     "Wall Street Market administrator moniker TheOne"),
        EvidenceItem("ev-pgp-match", _controls("theone", W2[0]), "PGP key correlation",
                     "dudebuy's vendor key and TheOne's published key are identical; "
                     "dudebuy's payouts pay this address"),
        EvidenceItem("ev-flow-w1",
                     Statement(Predicate.SIGN_OF,
                               (quote(controls_w2_inputs), quote(_controls("theone", W1)))),
                     "flow analysis",
                     "wallet W1 was funded in one hop by the W2 co-spend tx-fund-w1"),
        EvidenceItem("ev-flow-w4",
                     Statement(Predicate.SIGN_OF,
                               (quote(_controls("theone", W2[2])), quote(_controls("theone", W4[0])))),
                     "flow analysis",
                     "wallet W4 was funded in one hop from the W2 change address"),
        EvidenceItem("ev-w1-offence",
                     Statement(Predicate.SIGN_OF,
                               (quote(_controls("theone", W1)), quote(connected_w1))),
                     "flow analysis",
                     "W1 covered Wall Street Market operating costs, tying the "
                     "address to the market's administration"),
        EvidenceItem("ev-demix-reliable", Statement(Predicate.RELIABLE, ("demix-tool",)),
                     "vendor validation study",
                     "published evaluation of the de-mixing tool and prior "
                     "court acceptance"),
        EvidenceItem("ev-bppc-ptk",
                     Statement(Predicate.POSITION_TO_KNOW,
                               ("bppc", quote(_controls("defendant-x", MIXER_POOL)))),
                     "subpoena response",
                     "the processor received the mixer payout and holds "
                     "identity records for the receiving account"),
        EvidenceItem("ev-bppc-reliable", Statement(Predicate.RELIABLE, ("bppc",)),
                     "subpoena response",
                     "regulated processor answering under legal obligation"),
        EvidenceItem("ev-game-ptk",
                     Statement(Predicate.POSITION_TO_KNOW,
                               ("game-company", quote(_controls("defendant-x", W4[0])))),
                     "mutual legal assistance response",
                     "gaming deposits from W4 map to a verified customer account"),
        EvidenceItem("ev-game-reliable", Statement(Predicate.RELIABLE, ("game-company",)),
                     "mutual legal assistance response",
                     "business records produced under compulsion"),
    ):
        case.add_evidence(item)

    for tag in (
        AttributionTag((HANSA_HOT, HANSA_REST), "hansa", "seizure records"),
        AttributionTag(W2, "dudebuy", "seized-market payout records"),
        AttributionTag((MIXER_POOL,) + MIXER_EXITS + (MIXER_FEE,),
                       "mixer-service", "analyst annotation"),
        AttributionTag((BPPC_DEPOSIT,), "bppc", "subpoena response"),
        AttributionTag((GAME_DEPOSIT,), "game-company", "mutual legal assistance response"),
    ):
        case.add_attribution_tag(tag)

    # a1: the seized-market payout address implicates its controller.
    instantiate(case, "suspicion-through-address-control",
                {"E": "theone", "A": W2[0], "O": OFFENCE_ID})
    # a2, a3: clustering arguments the heuristics can justify on this chain
    # (the W2 co-spend and its change address). The mixer co-spend is
    # CoinJoin-shaped, so automation leaves it alone.
    auto_instantiate(case)
    # a4: wallet W1 was funded by the W2 cluster in one hop.
    instantiate(case, "argument-from-sign",
                {"F": controls_w2_inputs, "C": _controls("theone", W1)})
    # a5: wallet W4 was funded from the W2 change address.
    instantiate(case, "argument-from-sign",
                {"F": _controls("theone", W2[2]), "C": _controls("theone", W4[0])})
    # a6: W1 itself ties to the offence.
    instantiate(case, "argument-from-sign",
                {"F": _controls("theone", W1), "C": connected_w1})
    # a7: analyst manually asserts the mixer co-spend merge that automation
    # skipped; its CoinJoin exception question is the natural challenge.
    instantiate(case, "cluster-from-multi-input",
                {"E": "theone", "T": "tx-mix", "K": W1})
    # a8: the payment processor knows who controls the mixer pool address.
    instantiate(case, "position-to-know",
                {"W": "bppc", "A": _controls("defendant-x", MIXER_POOL)})
    # a9: de-mixing software links the mixer pool to W1; with the processor
    # naming the defendant, the defendant controls W1.
    instantiate(case, "cluster-from-software",
                {"S": "demix-tool", "A1": MIXER_POOL, "A2": W1, "E": "defendant-x"})
    # a10: gaming-company records corroborate the defendant behind W4.
    instantiate(case, "position-to-know",
                {"W": "game-company", "A": _controls("defendant-x", W4[0])})
    # a11: the final attribution: the defendant connects to the offence.
    instantiate(case, "suspicion-through-address-control",
                {"E": "defendant-x", "A": W1, "O": OFFENCE_ID})

    for arg_id, cq_id, justification in (
        ("a1", "cq1", "PGP key correlation recorded as ev-pgp-match"),
        ("a2", "cq3", "ev-pgp-match places addr-w2-a under TheOne's control; "
                      "tx-fund-w1 co-spends it with addr-w2-b"),
        ("a3", "cq2", "the payout wallet in use derives a fresh change address "
                      "per transaction; addr-w2-c never appeared before"),
        ("a4", "cq1", "single-hop funding with no intermediaries"),
        ("a5", "cq1", "single-hop funding from the detected change address"),
        ("a6", "cq1", "W1 paid the market's hosting invoices directly"),
        ("a7", "cq3", "TheOne's control of addr-w1-a follows from the W1 "
                      "funding argument a4"),
        ("a8", "cq1", "the processor onboarded the account that received the "
                      "mixer payout"),
        ("a8", "cq3", "the subpoena response names the account holder"),
        ("a9", "cq2", "vendor validation study and prior court acceptance"),
        ("a9", "cq3", "the co-spend in tx-mix exposes the same link through "
                      "the multi-input heuristic once the mix is unraveled"),
        ("a9", "cq4", "the processor's statement, argued in a8"),
        ("a10", "cq1", "deposits from W4 land in a verified customer account"),
        ("a10", "cq3", "the response letter names the customer"),
        ("a11", "cq1", "control of addr-w1-a is established by the software "
                       "de-mixing argument a9"),
    ):
        answer_cq(case, arg_id, cq_id, "favourable", justification)

    return case


def write_fixture(out_dir: str) -> tuple[str, str]:
    """Write chain.json and case.json under out_dir; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    chain_path = os.path.join(out_dir, "chain.json")
    case_path = os.path.join(out_dir, "case.json")
    case = build_case()
    with open(chain_path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(chain_json_obj(), indent=2) + "\n")
    save_case(case, case_path)
    return chain_path, case_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m chaincase.demo_case",
        description="write the bundled demonstration chain and case files",
    )
    parser.add_argument("--out", default=".", help="output directory")
    args = parser.parse_args(argv)
    chain_path, case_path = write_fixture(args.out)
    print(chain_path)
    print(case_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
