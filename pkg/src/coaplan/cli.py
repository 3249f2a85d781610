"""Command-line front end: batch planning, stepping, validation, export.

Thin shell over the library — every command's behavior is reachable through
the Python API with identical results.  Exit codes: 0 success (plan
infeasibilities are report content, not failures), 1 internal error,
2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import arc as _arc  # noqa: F401  (registers ARC generators)
from . import engine, kb as kb_mod, storage

ENV_PREFIX = "CADET_"

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2


def _env_default(name: str, fallback=None):
    return os.environ.get(ENV_PREFIX + name, fallback)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coaplan",
        description="Course-of-action planning: expansion, scheduling, export.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, need_out: bool = False):
        p.add_argument("--scenario", default=_env_default("SCENARIO"),
                       help="scenario document (.coa.json)")
        p.add_argument("--kb", default=_env_default("KB"),
                       help="knowledge base document (.kb.json); defaults to the shipped KB")
        if need_out:
            p.add_argument("--out", default=_env_default("OUT", "."),
                           help="output directory")
        p.add_argument("--increment", type=int,
                       default=int(_env_default("INCREMENT", "10")),
                       help="max new activities per increment")
        p.add_argument("--period", type=int,
                       default=int(_env_default("PERIOD", "15")),
                       help="synchronization matrix period in minutes")
        p.add_argument("--weighting", choices=("fastest", "covered"),
                       default=_env_default("WEIGHTING", "fastest"),
                       help="default route weighting preset")

    p_plan = sub.add_parser("plan", help="run a full plan and write plan + matrix files")
    common(p_plan, need_out=True)

    p_step = sub.add_parser("step", help="run one increment against a session file")
    common(p_step)
    p_step.add_argument("--session", required=True,
                        help="session file; created on first use, updated per step")

    p_val = sub.add_parser("validate", help="load and lint a scenario and/or KB")
    p_val.add_argument("--scenario", default=_env_default("SCENARIO"))
    p_val.add_argument("--kb", default=_env_default("KB"))

    p_exp = sub.add_parser("export", help="export matrix + logistics from a plan file")
    p_exp.add_argument("--plan", required=True, help="saved plan file (.plan.json)")
    p_exp.add_argument("--scenario", default=_env_default("SCENARIO"))
    p_exp.add_argument("--out", default=_env_default("OUT", "."))
    p_exp.add_argument("--period", type=int, default=int(_env_default("PERIOD", "15")))
    return parser


class InputError(Exception):
    pass


def _read(path: str, what: str) -> str:
    if not path:
        raise InputError(f"missing required {what} path")
    p = Path(path)
    if not p.exists():
        raise InputError(f"{what} file not found: {path}")
    return p.read_text()


def _load_kb(path) -> kb_mod.KnowledgeBase:
    text = _read(path, "kb") if path else kb_mod.default_kb_text()
    return kb_mod.load_kb(text)


def _make_session(args, scn, kb) -> engine.PlanningSession:
    plan = storage.make_plan(scn)
    params = engine.SessionParams(
        max_count=args.increment, weighting=args.weighting, period_minutes=args.period
    )
    return engine.PlanningSession(plan=plan, kb=kb, terrain=scn.terrain, params=params)


def _write_outputs(out_dir: str, name: str, sess: engine.PlanningSession, period: int) -> list[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    plan_path = out / f"{name}.plan.json"
    plan_path.write_text(storage.export_plan(sess.plan, sess.step_log))
    matrix_json, matrix_csv = storage.export_sync_matrix(sess.plan, period)
    json_path = out / f"{name}.sync.json"
    csv_path = out / f"{name}.sync.csv"
    json_path.write_text(matrix_json)
    csv_path.write_text(matrix_csv)
    return [str(plan_path), str(json_path), str(csv_path)]


def _summary_line(sess: engine.PlanningSession) -> str:
    plan = sess.plan
    scheduled = sum(1 for a in plan.activities.values() if a.is_scheduled)
    return (
        f"activities={len(plan.activities)} scheduled={scheduled} "
        f"infeasible={len(plan.infeasibilities)} revision={plan.revision}"
    )


def cmd_plan(args) -> int:
    scn = storage.load_scenario(_read(args.scenario, "scenario"))
    for w in scn.warnings:
        print(f"warning: {w}", file=sys.stderr)
    kb = _load_kb(args.kb)
    sess = _make_session(args, scn, kb)
    sess.produce_plan()
    files = _write_outputs(args.out, Path(args.scenario).stem.split(".")[0], sess, args.period)
    print(_summary_line(sess))
    for f in files:
        print(f"wrote {f}")
    for aid, reason in sess.plan.infeasibilities:
        print(f"infeasible: {aid} ({reason})")
    return EXIT_OK


def cmd_step(args) -> int:
    scn = storage.load_scenario(_read(args.scenario, "scenario"))
    kb = _load_kb(args.kb)
    session_path = Path(args.session)
    if session_path.exists():
        plan, step_log = storage.import_plan(session_path.read_text(), scn)
    else:
        plan, step_log = storage.make_plan(scn), []
    params = engine.SessionParams(
        max_count=args.increment, weighting=args.weighting, period_minutes=args.period
    )
    sess = engine.PlanningSession(
        plan=plan, kb=kb, terrain=scn.terrain, params=params, step_log=step_log
    )
    sess.restore_counters()
    if sess.complete:
        print("plan is complete; nothing to step")
        return EXIT_OK
    report = sess.step()
    session_path.write_text(storage.export_plan(sess.plan, sess.step_log))
    print(f"increment {report.increment}: "
          f"new={len(report.new_activities)} scheduled={len(report.scheduled)} "
          f"infeasible={len(report.infeasibilities)}"
          f"{' (complete)' if report.complete else ''}")
    for aid in report.new_activities:
        print(f"  + {aid}")
    for aid in report.scheduled:
        a = sess.plan.activities[aid]
        print(f"  * {aid} @ {a.scheduled_start}..{a.scheduled_end}")
    for aid, reason in report.infeasibilities:
        print(f"  ! {aid} ({reason})")
    return EXIT_OK


def cmd_validate(args) -> int:
    if not args.scenario and not args.kb:
        raise InputError("validate needs --scenario and/or --kb")
    status = EXIT_OK
    if args.scenario:
        try:
            scn = storage.load_scenario(_read(args.scenario, "scenario"))
            print(f"scenario ok: {scn.name} "
                  f"({len(scn.units)} units, {len(scn.root_activities)} roots)")
            for w in scn.warnings:
                print(f"warning: {w}")
        except storage.IOLoadError as e:
            for d in e.diagnostics:
                print(f"error: {d}", file=sys.stderr)
            status = EXIT_INPUT
    if args.kb or status == EXIT_OK:
        try:
            kb = _load_kb(args.kb)
            print(f"kb ok: {len(kb.classes)} classes")
        except kb_mod.KBLoadError as e:
            for d in e.diagnostics:
                print(f"error: {d}", file=sys.stderr)
            status = EXIT_INPUT
    return status


def cmd_export(args) -> int:
    scn = storage.load_scenario(_read(args.scenario, "scenario"))
    plan, _ = storage.import_plan(_read(args.plan, "plan"), scn)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    matrix_json, matrix_csv = storage.export_sync_matrix(plan, args.period)
    name = Path(args.plan).stem.split(".")[0]
    json_path = out / f"{name}.sync.json"
    csv_path = out / f"{name}.sync.csv"
    json_path.write_text(matrix_json)
    csv_path.write_text(matrix_csv)
    print(f"wrote {json_path}")
    print(f"wrote {csv_path}")
    return EXIT_OK


COMMANDS = {
    "plan": cmd_plan,
    "step": cmd_step,
    "validate": cmd_validate,
    "export": cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (storage.IOLoadError, kb_mod.KBLoadError) as e:
        for d in e.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return EXIT_INPUT
    except json.JSONDecodeError as e:
        print(f"error: malformed JSON: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as e:  # internal failure: report, never traceback-spam
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
