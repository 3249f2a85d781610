/** Wire types for the planning service. Field names mirror the JSON exactly. */

export type TimeBound = number | null; // null encodes an open (+inf) bound

export interface CreateSessionResponse {
  sessionId: string;
  revision: number;
  warnings: string[];
  rootActivities: string[];
}

export interface ActivityDoc {
  id: string;
  class: string;
  side: "BLUE" | "RED";
  performers: string[];
  candidateUnits: string[];
  startInterval: [number, TimeBound];
  endInterval: [number, TimeBound];
  minDuration: number;
  maxDuration: TimeBound;
  scheduledStart: number | null;
  scheduledEnd: number | null;
  status: "UNEXPANDED" | "EXPANDED" | "SCHEDULED" | "INFEASIBLE";
  parent: string | null;
  arcDepth: number;
  arcRole: string;
  location: string | null;
  path: string[];
  bosRow: string;
  params: Record<string, unknown>;
  infeasibleReason: string | null;
}

export interface StepResponse {
  increment: number;
  newActivities: string[];
  scheduled: string[];
  infeasibilities: [string, string][];
  complete: boolean;
  revision: number;
  activities: Record<string, ActivityDoc>;
}

export interface RunResponse {
  revision: number;
  increments: number;
  activities: number;
  scheduled: number;
  infeasibilities: [string, string][];
  complete: boolean;
}

export interface ConstraintDoc {
  id: string;
  from: string;
  fromAnchor: "STARTS" | "ENDS";
  lo: number;
  hi: TimeBound;
  to: string;
  toAnchor: "STARTS" | "ENDS";
}

export interface PlanDoc {
  version: number;
  revision: number;
  rootActivities: string[];
  activities: ActivityDoc[];
  constraints: ConstraintDoc[];
  infeasibilities: [string, string][];
  attrition: [string, string, number, number, number][];
  consumption: [string, string, number, number, number][];
  assignments: Record<string, [string, number, number, number][]>;
  stepLog: unknown[];
}

export interface MatrixCell {
  activity: string | null;
  label: string;
  startCol: number;
  endCol: number;
  status: string;
}

export interface MatrixRowDoc {
  name: string;
  cells: MatrixCell[];
}

export interface SeriesPoint {
  value: number;
  style: "ok" | "warn" | "critical";
}

export interface LogisticsSheet {
  unit: string;
  strength: SeriesPoint[];
  supplies: Record<string, SeriesPoint[]>;
}

export interface MatrixDoc {
  version: number;
  periodMinutes: number;
  columns: string[];
  rows: MatrixRowDoc[];
  infeasible: { activity: string; reason: string }[];
  logistics: LogisticsSheet[];
}

export interface LogisticsResponse {
  unit: string;
  periodMinutes: number;
  columns: string[];
  strength: SeriesPoint[];
  supplies: Record<string, SeriesPoint[]>;
}

export interface ScenarioSummary {
  name: string;
  units: string[];
  controlMeasures: string[];
  rootActivities: string[];
}

export type EditOp = "pin" | "params" | "delete";

export interface EditRequest {
  revision: number;
  op: EditOp;
  start?: number;
  params?: Record<string, unknown>;
}

export interface EditResponse {
  revision: number;
  activity?: ActivityDoc;
}
