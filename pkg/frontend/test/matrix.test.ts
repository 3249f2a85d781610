import { describe, expect, it } from "vitest";

import { MatrixViewModel, logisticsRows, styleFor } from "../src/matrix.js";
import type { LogisticsResponse, MatrixDoc, PlanDoc } from "../src/types.js";
import { fixture } from "./helpers.js";

const matrixDoc = fixture<MatrixDoc>("matrix15.json");
const planDoc = fixture<PlanDoc>("plan.json");
const logisticsDoc = fixture<LogisticsResponse>("logistics.json");

describe("matrix rendering", () => {
  it("renders every scheduled activity exactly once", () => {
    const vm = new MatrixViewModel(matrixDoc);
    const rendered = vm.visibleActivityIds();
    const counts = new Map<string, number>();
    for (const id of rendered) {
      counts.set(id, (counts.get(id) ?? 0) + 1);
    }
    const scheduled = planDoc.activities.filter((a) => a.status === "SCHEDULED");
    expect(scheduled.length).toBeGreaterThan(0);
    for (const act of scheduled) {
      expect(counts.get(act.id), `activity ${act.id}`).toBe(1);
    }
    expect(rendered).toHaveLength(scheduled.length);
  });

  it("keeps cells within the column range", () => {
    const vm = new MatrixViewModel(matrixDoc);
    for (const row of vm.rows()) {
      for (const cell of row.cells) {
        expect(cell.startCol).toBeGreaterThanOrEqual(0);
        expect(cell.endCol).toBeGreaterThanOrEqual(cell.startCol);
        expect(cell.endCol).toBeLessThan(matrixDoc.columns.length);
      }
    }
  });

  it("collapsing a row hides its cells and toggling restores them", () => {
    const vm = new MatrixViewModel(matrixDoc);
    const first = matrixDoc.rows[0];
    expect(first).toBeDefined();
    const name = first!.name;
    const before = vm.rows().find((r) => r.name === name)!.cells.length;
    expect(before).toBeGreaterThan(0);
    vm.toggleRow(name);
    const collapsed = vm.rows().find((r) => r.name === name)!;
    expect(collapsed.collapsed).toBe(true);
    expect(collapsed.cells).toHaveLength(0);
    vm.toggleRow(name);
    expect(vm.rows().find((r) => r.name === name)!.cells).toHaveLength(before);
  });

  it("text filter narrows cells case-insensitively", () => {
    const vm = new MatrixViewModel(matrixDoc);
    vm.setFilter("ARTILLERY_FIRE");
    const visible = vm.rows().flatMap((r) => r.cells);
    expect(visible.length).toBeGreaterThan(0);
    for (const cell of visible) {
      expect(cell.label.toUpperCase()).toContain("ARTILLERY_FIRE");
    }
    vm.setFilter("artillery_fire");
    expect(vm.rows().flatMap((r) => r.cells)).toHaveLength(visible.length);
    vm.setFilter("");
    expect(vm.visibleActivityIds().length).toBeGreaterThan(visible.length);
  });

  it("enemy activity lands in the threat row", () => {
    const threat = matrixDoc.rows.find((r) => r.name === "THREAT ACTION");
    expect(threat).toBeDefined();
    const redIds = new Set(
      planDoc.activities.filter((a) => a.side === "RED" && a.status === "SCHEDULED").map((a) => a.id),
    );
    for (const cell of threat!.cells) {
      if (cell.activity !== null) {
        expect(redIds.has(cell.activity)).toBe(true);
      }
    }
  });

  it("cell drawer is enriched once the plan is attached", () => {
    const vm = new MatrixViewModel(matrixDoc);
    const row = matrixDoc.rows.find((r) => r.cells.some((c) => c.activity !== null))!;
    const cell = row.cells.find((c) => c.activity !== null)!;
    const bare = vm.openDrawer(row.name, cell.activity!);
    expect(bare.activity).toBeNull();
    expect(bare.from).toBe(matrixDoc.columns[cell.startCol]);

    vm.attachPlan(planDoc);
    const rich = vm.openDrawer(row.name, cell.activity!);
    expect(rich.activity?.id).toBe(cell.activity);
    expect(rich.performers).toEqual(rich.activity?.performers);
    const expected = planDoc.constraints
      .filter((c) => c.from === cell.activity || c.to === cell.activity)
      .map((c) => c.id);
    expect(rich.constraints).toEqual(expected);
  });
});

describe("logistics styling", () => {
  it("style thresholds match the service's sheets", () => {
    for (const sheet of matrixDoc.logistics) {
      for (const series of Object.values(sheet.supplies)) {
        for (const point of series) {
          expect(point.style).toBe(styleFor(point.value));
        }
      }
    }
  });

  it("a critically low supply renders with the critical style class", () => {
    const criticalPoints = matrixDoc.logistics.flatMap((sheet) =>
      Object.values(sheet.supplies).flatMap((series) =>
        series.filter((p) => p.style === "critical"),
      ),
    );
    expect(criticalPoints.length).toBeGreaterThan(0);
    for (const p of criticalPoints) {
      expect(p.value).toBeLessThanOrEqual(0.25);
      expect(styleFor(p.value)).toBe("critical");
    }
  });

  it("flattens a unit sheet with worst rows first", () => {
    const rows = logisticsRows(logisticsDoc);
    expect(rows.map((r) => r.label)).toContain("strength");
    expect(rows.map((r) => r.label)).toContain("POL");
    const severity = { critical: 2, warn: 1, ok: 0 } as const;
    for (let i = 1; i < rows.length; i += 1) {
      expect(severity[rows[i - 1]!.worstStyle]).toBeGreaterThanOrEqual(
        severity[rows[i]!.worstStyle],
      );
    }
  });
});
