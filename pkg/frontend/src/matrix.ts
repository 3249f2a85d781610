/** View model for the synchronization matrix screen.
 *
 * Wraps a MatrixDoc from the service with the interactions the UI needs:
 * row collapse/expand, free-text cell filtering, and a cell drawer that is
 * enriched with activity detail once the full plan document is attached.
 */

import type {
  ActivityDoc,
  LogisticsResponse,
  MatrixCell,
  MatrixDoc,
  PlanDoc,
  SeriesPoint,
} from "./types.js";

export interface RowView {
  name: string;
  collapsed: boolean;
  cells: MatrixCell[];
}

export interface CellDrawer {
  cell: MatrixCell;
  row: string;
  /** Column header text for the cell's first and last period. */
  from: string;
  to: string;
  activity: ActivityDoc | null;
  performers: string[];
  constraints: string[];
}

/** Supply style thresholds, mirroring how the service styles its sheets. */
export function styleFor(fraction: number): SeriesPoint["style"] {
  if (fraction <= 0.25) {
    return "critical";
  }
  if (fraction <= 0.5) {
    return "warn";
  }
  return "ok";
}

export class MatrixViewModel {
  private readonly collapsedRows = new Set<string>();
  private filterText = "";
  private plan: PlanDoc | null = null;
  private readonly activityIndex = new Map<string, ActivityDoc>();

  constructor(readonly doc: MatrixDoc) {}

  /** Attach the full plan document so cell drawers can show detail. */
  attachPlan(plan: PlanDoc): void {
    this.plan = plan;
    this.activityIndex.clear();
    for (const act of plan.activities) {
      this.activityIndex.set(act.id, act);
    }
  }

  get columns(): string[] {
    return this.doc.columns;
  }

  toggleRow(name: string): void {
    if (this.collapsedRows.has(name)) {
      this.collapsedRows.delete(name);
    } else {
      this.collapsedRows.add(name);
    }
  }

  setFilter(text: string): void {
    this.filterText = text.trim().toLowerCase();
  }

  private matchesFilter(cell: MatrixCell): boolean {
    if (!this.filterText) {
      return true;
    }
    const hay = `${cell.label} ${cell.activity ?? ""} ${cell.status}`.toLowerCase();
    return hay.includes(this.filterText);
  }

  /** Rows in document order; collapsed rows keep their header but no cells. */
  rows(): RowView[] {
    return this.doc.rows.map((row) => {
      const collapsed = this.collapsedRows.has(row.name);
      return {
        name: row.name,
        collapsed,
        cells: collapsed ? [] : row.cells.filter((c) => this.matchesFilter(c)),
      };
    });
  }

  /** Every visible cell keyed by activity id; ids appear at most once. */
  visibleActivityIds(): string[] {
    const ids: string[] = [];
    for (const row of this.rows()) {
      for (const cell of row.cells) {
        if (cell.activity !== null) {
          ids.push(cell.activity);
        }
      }
    }
    return ids;
  }

  openDrawer(rowName: string, activityId: string): CellDrawer {
    const row = this.doc.rows.find((r) => r.name === rowName);
    if (row === undefined) {
      throw new Error(`unknown row: ${rowName}`);
    }
    const cell = row.cells.find((c) => c.activity === activityId);
    if (cell === undefined) {
      throw new Error(`no cell for ${activityId} in row ${rowName}`);
    }
    const activity = this.activityIndex.get(activityId) ?? null;
    const constraints =
      this.plan === null
        ? []
        : this.plan.constraints
            .filter((c) => c.from === activityId || c.to === activityId)
            .map((c) => c.id);
    return {
      cell,
      row: rowName,
      from: this.doc.columns[cell.startCol] ?? "",
      to: this.doc.columns[cell.endCol] ?? "",
      activity,
      performers: activity?.performers ?? [],
      constraints,
    };
  }
}

export interface LogisticsRowView {
  label: string;
  points: SeriesPoint[];
  worstStyle: SeriesPoint["style"];
}

/** Flatten a logistics sheet into displayable rows, worst style first. */
export function logisticsRows(sheet: LogisticsResponse): LogisticsRowView[] {
  const severity = { critical: 2, warn: 1, ok: 0 } as const;
  const worst = (points: SeriesPoint[]): SeriesPoint["style"] => {
    let top: SeriesPoint["style"] = "ok";
    for (const p of points) {
      if (severity[p.style] > severity[top]) {
        top = p.style;
      }
    }
    return top;
  };
  const rows: LogisticsRowView[] = [
    { label: "strength", points: sheet.strength, worstStyle: worst(sheet.strength) },
  ];
  for (const name of Object.keys(sheet.supplies).sort()) {
    const points = sheet.supplies[name] ?? [];
    rows.push({ label: name, points, worstStyle: worst(points) });
  }
  rows.sort((a, b) => severity[b.worstStyle] - severity[a.worstStyle]);
  return rows;
}
