/** View model for the stepping panel.
 *
 * Tracks the session revision for optimistic concurrency, accumulates
 * activity state from step responses, and renders the per-increment report
 * the panel shows after each step.
 */

import { StaleRevisionError } from "./client.js";
import type {
  ActivityDoc,
  CreateSessionResponse,
  EditRequest,
  StepResponse,
  TimeBound,
} from "./types.js";

function fmtTime(minutes: number): string {
  const h = Math.floor(minutes / 60);
  const m = minutes % 60;
  return `H+${h}:${String(m).padStart(2, "0")}`;
}

function fmtBound(bound: TimeBound): string {
  return bound === null ? "open" : fmtTime(bound);
}

export class StepPanel {
  revision = 0;
  complete = false;
  private readonly activities = new Map<string, ActivityDoc>();
  private lastStep: StepResponse | null = null;

  applyCreate(resp: CreateSessionResponse): void {
    this.revision = resp.revision;
    this.complete = false;
    this.activities.clear();
    this.lastStep = null;
  }

  applyStep(resp: StepResponse): void {
    this.revision = resp.revision;
    this.complete = resp.complete;
    this.lastStep = resp;
    for (const [id, doc] of Object.entries(resp.activities)) {
      this.activities.set(id, doc);
    }
  }

  activity(id: string): ActivityDoc | undefined {
    return this.activities.get(id);
  }

  knownActivityIds(): string[] {
    return [...this.activities.keys()].sort();
  }

  /** Human-readable lines describing what the last step changed. */
  reportLines(): string[] {
    if (this.lastStep === null) {
      return [];
    }
    const lines: string[] = [];
    for (const id of this.lastStep.newActivities) {
      const doc = this.activities.get(id);
      const cls = doc === undefined ? "?" : doc.class;
      lines.push(`+ ${id} (${cls})`);
    }
    for (const id of this.lastStep.scheduled) {
      const doc = this.activities.get(id);
      if (doc !== undefined && doc.scheduledStart !== null && doc.scheduledEnd !== null) {
        lines.push(`* ${id} @ ${fmtTime(doc.scheduledStart)}..${fmtTime(doc.scheduledEnd)}`);
      } else {
        lines.push(`* ${id}`);
      }
    }
    for (const [id, reason] of this.lastStep.infeasibilities) {
      lines.push(`! ${id}: ${reason}`);
    }
    return lines;
  }

  /** Build a pin edit at the current revision. */
  pinRequest(start: number): EditRequest {
    return { revision: this.revision, op: "pin", start };
  }

  deleteRequest(): EditRequest {
    return { revision: this.revision, op: "delete" };
  }

  paramsRequest(params: Record<string, unknown>): EditRequest {
    return { revision: this.revision, op: "params", params };
  }

  /** Summarize an edit failure; on a stale revision, resync to the server's. */
  handleEditFailure(err: unknown): string {
    if (err instanceof StaleRevisionError) {
      this.revision = err.current;
      return `plan changed under you; now at revision ${err.current} — retry the edit`;
    }
    if (err instanceof Error) {
      return err.message;
    }
    return String(err);
  }

  /** Display text for an activity's allowed start window. */
  startWindowText(id: string): string {
    const doc = this.activities.get(id);
    if (doc === undefined) {
      return "unknown activity";
    }
    const [lo, hi] = doc.startInterval;
    return `${fmtTime(lo)} .. ${fmtBound(hi)}`;
  }
}
