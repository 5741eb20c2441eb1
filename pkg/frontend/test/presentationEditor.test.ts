import { beforeEach, describe, expect, it } from "vitest";

import { DanglingReferenceError, PresentationEditor } from "../src/presentationEditor";
import { FakeService, sessionFixture } from "./fakes";

describe("presentation grid editor", () => {
  let service: FakeService;
  let editor: PresentationEditor;

  beforeEach(() => {
    service = new FakeService();
    editor = new PresentationEditor(service, {
      id: "doc1",
      title: "cohort",
      subtitle: "",
      cells: [],
    });
  });

  it("adds a cell from a saved brush with a frozen snapshot", () => {
    const session = sessionFixture();
    const cell = editor.addCellFromBrush(
      session, "b1", "P03", "group A", "affected", { BIC: 0.6, TRI: 0.4 }, "note",
    );
    expect(cell.interval).toEqual([0.2, 0.7]);
    expect(cell.session_id).toBe("s1");
    expect(editor.doc.cells).toHaveLength(1);
  });

  it("blocks dangling brush references before anything reaches the service", () => {
    const session = sessionFixture();
    expect(() =>
      editor.addCellFromBrush(session, "ghost", "P03", "g", "affected", {}),
    ).toThrow(DanglingReferenceError);
    expect(editor.doc.cells).toHaveLength(0);
    expect(service.calls).toHaveLength(0);
  });

  it("add and remove round-trip through the service", async () => {
    const session = sessionFixture();
    editor.addCellFromBrush(session, "b1", "P03", "A", "affected", { BIC: 1.0 });
    editor.addCellFromBrush(session, "b1", "P03", "B", "affected", { TRI: 1.0 });
    await editor.save();
    const reloaded = new PresentationEditor(service);
    await reloaded.load("doc1");
    expect(reloaded.doc).toEqual(editor.doc);

    reloaded.removeCell(0);
    await reloaded.save();
    const again = new PresentationEditor(service);
    await again.load("doc1");
    expect(again.doc.cells).toHaveLength(1);
    expect(again.doc.cells[0].column).toBe("B");
  });

  it("annotations are editable and persisted", async () => {
    const session = sessionFixture();
    editor.addCellFromBrush(session, "b1", "P03", "A", "affected", { BIC: 1.0 });
    editor.annotate(0, "biceps compensation");
    await editor.save();
    const reloaded = new PresentationEditor(service);
    await reloaded.load("doc1");
    expect(reloaded.doc.cells[0].annotation).toBe("biceps compensation");
  });

  it("export delegates to the server render", async () => {
    const session = sessionFixture();
    editor.addCellFromBrush(session, "b1", "P03", "A", "affected", { BIC: 1.0 });
    await editor.save();
    const svg = await editor.exportStatic();
    expect(svg).toBe('<svg data-doc="doc1"/>');
    expect(service.callsTo("exportPresentation")[0].args).toEqual(
      ["doc1", "static-render"],
    );
  });

  it("renders the grid with one column per finding group", () => {
    const session = sessionFixture();
    for (const column of ["overshooters", "no trapezius", "trapezius reliant"]) {
      editor.addCellFromBrush(session, "b1", "P03", column, "affected", { BIC: 1.0 });
    }
    const container = document.createElement("div");
    editor.render(container, { BIC: "#1f78b4" });
    const headers = [...container.querySelectorAll("table tr:first-child th")];
    expect(headers.map((h) => h.textContent)).toEqual([
      "overshooters", "no trapezius", "trapezius reliant",
    ]);
    expect(container.querySelectorAll("path.arc").length).toBe(3);
    expect(container.querySelectorAll("input.annotation").length).toBe(3);
  });
});
