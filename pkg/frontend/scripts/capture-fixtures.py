"""Record REST responses from the real case service for the UI test suite.

Runs the bundled demo case through the HTTP app and saves every payload the
frontend renders, plus the answer round trip that flips the mixer co-spend
argument (and everything resting on it) to defeated. The saved files are the
contract the TypeScript tests run against; re-run this script after changing
the service payloads.

Usage: python3 scripts/capture-fixtures.py  (from the frontend directory)
"""

import json
import os
import sys
import tempfile

from fastapi.testclient import TestClient

from chaincase import demo_case
from chaincase.service import CaseStore, create_app

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")

ANSWER_ARG = "a7"
ANSWER_CQ = "cq1"
ANSWER_BODY = {
    "answer": "unfavourable",
    "justification": "mixing-service records show pooled keys, not a single owner",
}


def save(name: str, payload: object) -> None:
    path = os.path.join(FIXTURE_DIR, name)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {os.path.relpath(path)}")


def get(client: TestClient, path: str) -> dict:
    response = client.get(path)
    if response.status_code != 200:
        raise SystemExit(f"GET {path} -> {response.status_code}: {response.text}")
    return response.json()


def main() -> int:
    os.makedirs(FIXTURE_DIR, exist_ok=True)
    with tempfile.TemporaryDirectory() as case_dir:
        demo_case.write_fixture(case_dir)
        client = TestClient(create_app(CaseStore(case_dir)))
        case_id = demo_case.CASE_ID
        base = f"/api/cases/{case_id}"

        save("cases.json", get(client, "/api/cases"))
        save("case.json", get(client, base))
        save("clusters.json", get(client, f"{base}/clusters"))
        save("schemes.json", get(client, "/api/schemes"))
        save("arguments_before.json", get(client, f"{base}/arguments"))
        save("evaluation_before.json", get(client, f"{base}/evaluation"))
        save("cqs_before.json", get(client, f"{base}/cqs"))
        save("report_before.json", get(client, f"{base}/report"))

        answer_path = f"{base}/arguments/{ANSWER_ARG}/cqs/{ANSWER_CQ}/answer"
        response = client.post(answer_path, json=ANSWER_BODY)
        if response.status_code != 200:
            raise SystemExit(
                f"POST {answer_path} -> {response.status_code}: {response.text}")
        save("answer_response.json", response.json())

        save("arguments_after.json", get(client, f"{base}/arguments"))
        save("cqs_after.json", get(client, f"{base}/cqs"))
        save("report_after.json", get(client, f"{base}/report"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
