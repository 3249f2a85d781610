"""Record HTTP API fixtures for the frontend contract tests.

Runs the real service in-process and captures raw response bodies, so the
frontend tests exercise exactly what the wire carries.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from coaplan import service

ROOT = Path(__file__).resolve().parents[2]
OUT = Path(__file__).resolve().parents[1] / "test" / "fixtures"
SCENARIO = json.loads((ROOT / "scenarios" / "demo.coa.json").read_text())


def save(name: str, text: str) -> None:
    (OUT / name).write_text(text if text.endswith("\n") else text + "\n")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    client = TestClient(service.app)

    # A stepped session, recorded before completion.
    resp = client.post("/sessions", json={"scenario": SCENARIO})
    save("create.json", resp.text)
    sid = resp.json()["sessionId"]
    step = client.post(f"/sessions/{sid}/step")
    save("step1.json", step.text)

    stale = client.patch(
        f"/sessions/{sid}/activities/pol-north",
        json={"revision": step.json()["revision"] - 1, "op": "pin", "start": 0},
    )
    assert stale.status_code == 409
    save("stale409.json", stale.text)

    bad_pin = client.patch(
        f"/sessions/{sid}/activities/pol-north",
        json={"revision": step.json()["revision"], "op": "pin", "start": 9_000_000},
    )
    assert bad_pin.status_code == 422
    save("invalidpin422.json", bad_pin.text)

    # A completed session for plan/matrix/logistics views.
    resp = client.post("/sessions", json={"scenario": SCENARIO})
    sid2 = resp.json()["sessionId"]
    run = client.post(f"/sessions/{sid2}/run")
    save("run.json", run.text)
    save("plan.json", client.get(f"/sessions/{sid2}/plan").text)
    save("matrix15.json", client.get(f"/sessions/{sid2}/matrix", params={"period": 15}).text)
    save("logistics.json", client.get(f"/sessions/{sid2}/logistics/blu-arty-div2").text)
    save("scenario.json", client.get(f"/sessions/{sid2}/scenario").text)
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
