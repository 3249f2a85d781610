/** Local scenario editor.
 *
 * Lets a user assemble or adjust a scenario document before posting it to
 * the service. Validation catches dangling references client-side so the
 * common mistakes surface before a round trip.
 */

export interface TerrainPointDraft {
  id: string;
  x: number;
  y: number;
  trafficability?: string;
  threat?: number;
  concealment?: number;
}

export interface TerrainSegmentDraft {
  from: string;
  to: string;
  trafficability?: string;
  threat?: number;
  concealment?: number;
}

export interface UnitDraft {
  id: string;
  side: "BLUE" | "RED";
  location: string;
  strength?: number;
  speed?: number;
  supplies?: Record<string, number>;
  capabilities?: string[];
  echelon?: string;
  effort?: string;
}

export interface ActivityDraft {
  id: string;
  class: string;
  side: "BLUE" | "RED";
  candidateUnits?: string[];
  location?: string;
  params?: Record<string, unknown>;
  startInterval?: [number, number | null];
  endInterval?: [number, number | null];
}

export interface ConstraintDraft {
  id: string;
  from: string;
  fromAnchor: "STARTS" | "ENDS";
  lo: number;
  hi: number | null;
  to: string;
  toAnchor: "STARTS" | "ENDS";
}

export interface ControlMeasureDraft {
  id: string;
  kind: string;
  geometry: string[];
}

export interface ValidationIssue {
  code: "DANGLING_REF" | "DUPLICATE_ID" | "MISSING_FIELD";
  where: string;
  message: string;
}

export class CoaEditor {
  name = "untitled";
  readonly points: TerrainPointDraft[] = [];
  readonly segments: TerrainSegmentDraft[] = [];
  readonly units: UnitDraft[] = [];
  readonly controlMeasures: ControlMeasureDraft[] = [];
  readonly activities: ActivityDraft[] = [];
  readonly constraints: ConstraintDraft[] = [];

  addPoint(point: TerrainPointDraft): void {
    this.points.push(point);
  }

  addSegment(segment: TerrainSegmentDraft): void {
    this.segments.push(segment);
  }

  addUnit(unit: UnitDraft): void {
    this.units.push(unit);
  }

  removeUnit(id: string): boolean {
    const i = this.units.findIndex((u) => u.id === id);
    if (i < 0) {
      return false;
    }
    this.units.splice(i, 1);
    return true;
  }

  addControlMeasure(cm: ControlMeasureDraft): void {
    this.controlMeasures.push(cm);
  }

  addActivity(act: ActivityDraft): void {
    this.activities.push(act);
  }

  removeActivity(id: string): boolean {
    const i = this.activities.findIndex((a) => a.id === id);
    if (i < 0) {
      return false;
    }
    this.activities.splice(i, 1);
    return true;
  }

  addConstraint(con: ConstraintDraft): void {
    this.constraints.push(con);
  }

  removeConstraint(id: string): boolean {
    const i = this.constraints.findIndex((c) => c.id === id);
    if (i < 0) {
      return false;
    }
    this.constraints.splice(i, 1);
    return true;
  }

  /** Check cross-references the service would also reject. */
  validate(): ValidationIssue[] {
    const issues: ValidationIssue[] = [];
    const pointIds = new Set(this.points.map((p) => p.id));
    const activityIds = new Set<string>();

    const dupCheck = (ids: string[], kind: string) => {
      const seen = new Set<string>();
      for (const id of ids) {
        if (seen.has(id)) {
          issues.push({
            code: "DUPLICATE_ID",
            where: `${kind} '${id}'`,
            message: `duplicate ${kind} id '${id}'`,
          });
        }
        seen.add(id);
      }
    };
    dupCheck(this.points.map((p) => p.id), "point");
    dupCheck(this.units.map((u) => u.id), "unit");
    dupCheck(this.activities.map((a) => a.id), "activity");
    dupCheck(this.constraints.map((c) => c.id), "constraint");

    for (const seg of this.segments) {
      for (const end of [seg.from, seg.to]) {
        if (!pointIds.has(end)) {
          issues.push({
            code: "DANGLING_REF",
            where: `segment ${seg.from}-${seg.to}`,
            message: `segment references unknown point '${end}'`,
          });
        }
      }
    }
    for (const unit of this.units) {
      if (!unit.location) {
        issues.push({
          code: "MISSING_FIELD",
          where: `unit '${unit.id}'`,
          message: `unit '${unit.id}' has no location`,
        });
      } else if (!pointIds.has(unit.location)) {
        issues.push({
          code: "DANGLING_REF",
          where: `unit '${unit.id}'`,
          message: `unit '${unit.id}' placed at unknown point '${unit.location}'`,
        });
      }
    }
    for (const cm of this.controlMeasures) {
      for (const pid of cm.geometry) {
        if (!pointIds.has(pid)) {
          issues.push({
            code: "DANGLING_REF",
            where: `control measure '${cm.id}'`,
            message: `control measure '${cm.id}' references unknown point '${pid}'`,
          });
        }
      }
    }
    const unitIds = new Set(this.units.map((u) => u.id));
    for (const act of this.activities) {
      activityIds.add(act.id);
      for (const uid of act.candidateUnits ?? []) {
        if (!unitIds.has(uid)) {
          issues.push({
            code: "DANGLING_REF",
            where: `activity '${act.id}'`,
            message: `activity '${act.id}' lists unknown unit '${uid}'`,
          });
        }
      }
      if (act.location !== undefined && !pointIds.has(act.location)) {
        issues.push({
          code: "DANGLING_REF",
          where: `activity '${act.id}'`,
          message: `activity '${act.id}' targets unknown point '${act.location}'`,
        });
      }
    }
    for (const con of this.constraints) {
      for (const end of [con.from, con.to]) {
        if (!activityIds.has(end)) {
          issues.push({
            code: "DANGLING_REF",
            where: `constraint '${con.id}'`,
            message: `constraint '${con.id}' references unknown activity '${end}'`,
          });
        }
      }
    }
    return issues;
  }

  /** Assemble the document the create-session endpoint accepts. */
  buildScenario(): Record<string, unknown> {
    return {
      version: 1,
      name: this.name,
      terrain: { points: this.points, segments: this.segments },
      units: this.units,
      controlMeasures: this.controlMeasures,
      activities: this.activities,
      constraints: this.constraints,
      config: {},
    };
  }
}
