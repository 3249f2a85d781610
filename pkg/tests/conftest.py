import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import coaplan.arc  # noqa: F401,E402  (registers ARC generators)
from coaplan import engine, kb as kb_mod, storage  # noqa: E402

REPO = Path(__file__).parent.parent
DEMO_SCENARIO = REPO / "scenarios" / "demo.coa.json"
OVERCONSTRAINED_SCENARIO = REPO / "scenarios" / "overconstrained.coa.json"


@pytest.fixture(scope="session")
def default_kb():
    return kb_mod.load_default_kb()


@pytest.fixture()
def demo_scenario():
    return storage.load_scenario(DEMO_SCENARIO.read_text())


@pytest.fixture()
def demo_session(demo_scenario, default_kb):
    plan = storage.make_plan(demo_scenario)
    return engine.PlanningSession(
        plan=plan, kb=default_kb, terrain=demo_scenario.terrain
    )


def run_demo(default_kb):
    """Fresh full run of the demo scenario; returns the finished session."""
    scn = storage.load_scenario(DEMO_SCENARIO.read_text())
    sess = engine.PlanningSession(
        plan=storage.make_plan(scn), kb=default_kb, terrain=scn.terrain
    )
    sess.produce_plan()
    return sess


@pytest.fixture(scope="session")
def completed_demo(default_kb):
    return run_demo(default_kb)
