/**
 * Annotated presentation grid: rows are patients, columns are finding
 * groups, each cell freezes a brushed proportion snapshot.  Cells can
 * only reference brushes that exist in their session, so dangling
 * references are blocked at edit time; exports are rendered server-side.
 */

import { renderDonut } from "./donut";
import type {
  GridCellModel,
  PresentationModel,
  SessionModel,
  Side,
  WorkbenchService,
} from "./types";

export class DanglingReferenceError extends Error {}

export class PresentationEditor {
  doc: PresentationModel;

  constructor(
    private service: WorkbenchService,
    doc?: PresentationModel,
  ) {
    this.doc = doc ?? { id: "", title: "", subtitle: "", cells: [] };
  }

  /** Add an insight cell; the brush must exist in the given session. */
  addCellFromBrush(
    session: SessionModel,
    brushId: string,
    row: string,
    column: string,
    side: Side,
    shares: Record<string, number>,
    annotation = "",
  ): GridCellModel {
    const brush = session.brushes.find((b) => b.id === brushId);
    if (!brush) {
      throw new DanglingReferenceError(
        `brush '${brushId}' not found in session '${session.id}'`,
      );
    }
    const cell: GridCellModel = {
      row,
      column,
      session_id: session.id,
      brush_id: brushId,
      side,
      interval: [brush.t0, brush.t1],
      shares: { ...shares },
      annotation,
    };
    this.doc.cells.push(cell);
    return cell;
  }

  removeCell(index: number): void {
    this.doc.cells.splice(index, 1);
  }

  annotate(index: number, text: string): void {
    this.doc.cells[index].annotation = text;
  }

  async save(): Promise<string> {
    const { id } = await this.service.putPresentation(this.doc.id, this.doc);
    this.doc.id = id;
    return id;
  }

  async load(id: string): Promise<PresentationModel> {
    this.doc = await this.service.getPresentation(id);
    return this.doc;
  }

  /** Server-side static render (SVG text). */
  exportStatic(): Promise<string> {
    return this.service.exportPresentation(this.doc.id, "static-render");
  }

  render(container: HTMLElement, colors: Record<string, string>): void {
    container.textContent = "";
    container.className = "presentation-grid";
    const title = document.createElement("h2");
    title.textContent = this.doc.title;
    container.appendChild(title);
    if (this.doc.subtitle) {
      const subtitle = document.createElement("h3");
      subtitle.textContent = this.doc.subtitle;
      container.appendChild(subtitle);
    }
    const columns: string[] = [];
    const rows: string[] = [];
    for (const cell of this.doc.cells) {
      if (!columns.includes(cell.column)) columns.push(cell.column);
      if (!rows.includes(cell.row)) rows.push(cell.row);
    }
    const table = document.createElement("table");
    const head = table.insertRow();
    head.insertCell();
    for (const column of columns) {
      const th = document.createElement("th");
      th.textContent = column;
      head.appendChild(th);
    }
    for (const rowLabel of rows) {
      const tr = table.insertRow();
      const th = document.createElement("th");
      th.textContent = rowLabel;
      tr.appendChild(th);
      for (const column of columns) {
        const td = tr.insertCell();
        const index = this.doc.cells.findIndex(
          (c) => c.row === rowLabel && c.column === column,
        );
        if (index < 0) continue;
        const cell = this.doc.cells[index];
        td.dataset.cellIndex = String(index);
        const donut = document.createElement("div");
        renderDonut(
          donut,
          { side: cell.side, interval: cell.interval, shares: cell.shares },
          colors,
        );
        td.appendChild(donut);
        const note = document.createElement("input");
        note.className = "annotation";
        note.value = cell.annotation;
        note.addEventListener("change", () => this.annotate(index, note.value));
        td.appendChild(note);
      }
    }
    container.appendChild(table);
  }
}
