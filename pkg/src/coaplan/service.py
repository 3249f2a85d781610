"""HTTP API for planning sessions.

Sessions live in memory, one engine per session, with per-session locks so
concurrent requests to the same session serialize into a total order
matching revision numbers.  Edits carry the revision they were based on;
a mismatch is a 409.  Scope is a single planning cell, not a fleet
service: no auth, no persistence beyond explicit exports.
"""

from __future__ import annotations

import itertools
import os
import threading
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Response
from pydantic import BaseModel

from . import arc as _arc  # noqa: F401  (registers ARC generators)
from . import engine, kb as kb_mod, storage

DEFAULT_PORT = 8400


class CreateSessionRequest(BaseModel):
    scenario: dict
    kb: Optional[dict] = None
    maxCount: int = 10
    period: int = 15
    weighting: str = "fastest"


class EditRequest(BaseModel):
    revision: int
    op: str  # pin | params | delete
    start: Optional[int] = None
    params: Optional[dict] = None


@dataclass
class SessionSlot:
    session: engine.PlanningSession
    lock: threading.Lock = field(default_factory=threading.Lock)


_sessions: dict[str, SessionSlot] = {}
_session_ids = itertools.count(1)
_registry_lock = threading.Lock()

app = FastAPI(
    title="coaplan service",
    description="Incremental course-of-action planning sessions",
    version="1.0.0",
)


def _slot(session_id: str) -> SessionSlot:
    slot = _sessions.get(session_id)
    if slot is None:
        raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
    return slot


def _canonical(doc: dict) -> Response:
    return Response(content=storage.canonical_dumps(doc), media_type="application/json")


def _report_doc(report: engine.IncrementReport, sess: engine.PlanningSession) -> dict:
    return {
        "increment": report.increment,
        "newActivities": list(report.new_activities),
        "scheduled": list(report.scheduled),
        "infeasibilities": [[aid, reason] for aid, reason in report.infeasibilities],
        "complete": report.complete,
        "revision": sess.revision,
    }


def _activity_doc(sess: engine.PlanningSession, aid: str) -> dict:
    return storage._activity_to_doc(sess.plan.activities[aid])


@app.post("/sessions")
def create_session(req: CreateSessionRequest):
    try:
        scn = storage.load_scenario(storage.canonical_dumps(req.scenario))
    except storage.IOLoadError as e:
        raise HTTPException(status_code=422, detail=[str(d) for d in e.diagnostics])
    try:
        kb = (
            kb_mod.load_kb(storage.canonical_dumps(req.kb))
            if req.kb is not None
            else kb_mod.load_default_kb()
        )
    except kb_mod.KBLoadError as e:
        raise HTTPException(status_code=422, detail=[str(d) for d in e.diagnostics])
    params = engine.SessionParams(
        max_count=req.maxCount, weighting=req.weighting, period_minutes=req.period
    )
    sess = engine.PlanningSession(
        plan=storage.make_plan(scn), kb=kb, terrain=scn.terrain, params=params
    )
    with _registry_lock:
        session_id = f"s{next(_session_ids)}"
        _sessions[session_id] = SessionSlot(sess)
    return {
        "sessionId": session_id,
        "revision": sess.revision,
        "warnings": list(scn.warnings),
        "rootActivities": list(sess.plan.root_activities),
    }


@app.post("/sessions/{session_id}/step")
def step_session(session_id: str):
    slot = _slot(session_id)
    with slot.lock:
        try:
            report = slot.session.step()
        except engine.StepOnComplete:
            raise HTTPException(status_code=409, detail="STEP_ON_COMPLETE")
        doc = _report_doc(report, slot.session)
        doc["activities"] = {
            aid: _activity_doc(slot.session, aid)
            for aid in report.new_activities + report.scheduled
            if aid in slot.session.plan.activities
        }
        return doc


@app.post("/sessions/{session_id}/run")
def run_session(session_id: str):
    slot = _slot(session_id)
    with slot.lock:
        sess = slot.session
        increments = 0
        while not sess.complete:
            sess.step()
            increments += 1
        plan = sess.plan
        return {
            "revision": sess.revision,
            "increments": increments,
            "activities": len(plan.activities),
            "scheduled": sum(1 for a in plan.activities.values() if a.is_scheduled),
            "infeasibilities": [[aid, r] for aid, r in plan.infeasibilities],
            "complete": True,
        }


@app.patch("/sessions/{session_id}/activities/{activity_id}")
def edit_activity(session_id: str, activity_id: str, req: EditRequest):
    slot = _slot(session_id)
    with slot.lock:
        sess = slot.session
        if activity_id not in sess.plan.activities:
            raise HTTPException(status_code=404, detail=f"unknown activity {activity_id!r}")
        if req.revision != sess.revision:
            raise HTTPException(
                status_code=409,
                detail={"error": "STALE_REVISION", "current": sess.revision},
            )
        try:
            if req.op == "pin":
                if req.start is None:
                    raise HTTPException(status_code=422, detail="pin requires 'start'")
                sess.edit_pin(activity_id, req.start)
            elif req.op == "params":
                sess.edit_params(activity_id, req.params or {})
            elif req.op == "delete":
                sess.edit_delete(activity_id)
            else:
                raise HTTPException(status_code=422, detail=f"unknown op {req.op!r}")
        except engine.InvalidEdit as e:
            detail = {"error": str(e)}
            if e.interval is not None:
                detail["interval"] = storage._enc_interval(e.interval)
            raise HTTPException(status_code=422, detail=detail)
        doc = {"revision": sess.revision}
        if activity_id in sess.plan.activities:
            doc["activity"] = _activity_doc(sess, activity_id)
        return doc


@app.get("/sessions/{session_id}/plan")
def get_plan(session_id: str):
    slot = _slot(session_id)
    with slot.lock:
        return Response(
            content=storage.export_plan(slot.session.plan, slot.session.step_log),
            media_type="application/json",
        )


@app.get("/sessions/{session_id}/matrix")
def get_matrix(session_id: str, period: int = Query(default=15, ge=1)):
    slot = _slot(session_id)
    with slot.lock:
        try:
            matrix = storage.build_sync_matrix(slot.session.plan, period)
        except storage.IOLoadError as e:
            raise HTTPException(status_code=422, detail=[str(d) for d in e.diagnostics])
        return _canonical(matrix)


@app.get("/sessions/{session_id}/logistics/{unit_id}")
def get_logistics(session_id: str, unit_id: str, period: int = Query(default=15, ge=1)):
    slot = _slot(session_id)
    with slot.lock:
        plan = slot.session.plan
        if plan.scenario is None or unit_id not in plan.scenario.units:
            raise HTTPException(status_code=404, detail=f"unknown unit {unit_id!r}")
        matrix = storage.build_sync_matrix(plan, period)
        for sheet in matrix["logistics"]:
            if sheet["unit"] == unit_id:
                return _canonical(
                    {"unit": unit_id, "periodMinutes": period,
                     "columns": matrix["columns"], "strength": sheet["strength"],
                     "supplies": sheet["supplies"]}
                )
        raise HTTPException(status_code=404, detail=f"no logistics for {unit_id!r}")


@app.get("/sessions/{session_id}/scenario")
def get_scenario_summary(session_id: str):
    slot = _slot(session_id)
    with slot.lock:
        scn = slot.session.plan.scenario
        return {
            "name": scn.name,
            "units": sorted(scn.units),
            "controlMeasures": sorted(scn.control_measures),
            "rootActivities": list(slot.session.plan.root_activities),
        }


def main() -> None:
    import uvicorn

    port = int(os.environ.get("CADET_PORT", DEFAULT_PORT))
    uvicorn.run(app, host="127.0.0.1", port=port)


if __name__ == "__main__":
    main()
