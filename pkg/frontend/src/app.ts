/**
 * Workbench wiring: query panel, bundle comparison view with threshold
 * slider and mute legend, brush-driven donut and video playback, and the
 * presentation grid editor.  All analysis numbers come from the service.
 */

import { BrushController } from "./brush";
import { HttpService } from "./client";
import { ComparisonView } from "./comparisonView";
import { MuscleLegend } from "./legend";
import { PresentationEditor } from "./presentationEditor";
import { QueryPanel } from "./queryPanel";
import { ThresholdSlider } from "./thresholdSlider";
import type { ComparisonPayload, Side, WorkbenchService } from "./types";
import { PlayheadSync } from "./videoSync";
import { ViewState } from "./viewState";

export class WorkbenchApp {
  readonly state = new ViewState();
  readonly view: ComparisonView;
  readonly slider: ThresholdSlider;
  readonly legend: MuscleLegend;
  readonly query: QueryPanel;
  readonly brush: BrushController;
  readonly playhead: PlayheadSync;
  readonly editor: PresentationEditor;
  private payload: ComparisonPayload | null = null;

  constructor(
    root: HTMLElement,
    private service: WorkbenchService = new HttpService(""),
  ) {
    const chartArea = document.createElement("div");
    chartArea.className = "chart-area";
    const donutArea = document.createElement("div");
    const video = document.createElement("video");
    video.className = "inspection-video";
    video.controls = true;

    this.view = new ComparisonView(chartArea);
    this.playhead = new PlayheadSync(video, (t) => this.view.setPlayhead(t));
    this.slider = new ThresholdSlider(this.service, this.state, (visibility) => {
      this.view.applyVisibility(visibility);
    });
    this.legend = new MuscleLegend(this.service, this.state, (payload) => {
      this.usePayload(payload);
    });
    this.brush = new BrushController(
      this.service,
      this.state,
      donutArea,
      this.playhead,
      () => this.colorMap(),
    );
    this.query = new QueryPanel(this.service, this.state, () => undefined);
    this.editor = new PresentationEditor(this.service);

    const toggle = document.createElement("button");
    toggle.className = "layout-toggle";
    toggle.textContent = "stacked";
    toggle.addEventListener("click", () => {
      this.state.layoutMode =
        this.state.layoutMode === "stacked" ? "small-multiples" : "stacked";
      toggle.textContent =
        this.state.layoutMode === "stacked" ? "small multiples" : "stacked";
      this.view.setLayout(this.state.layoutMode);
    });

    const compare = document.createElement("button");
    compare.className = "compare-button";
    compare.textContent = "compare";
    compare.addEventListener("click", () => {
      const { patient, motion } = this.state.filters;
      if (patient && motion) void this.openComparison(patient, motion);
    });

    this.wireBrushPointer(chartArea);

    root.appendChild(this.query.element);
    root.appendChild(compare);
    root.appendChild(toggle);
    root.appendChild(this.slider.element);
    root.appendChild(this.legend.element);
    root.appendChild(chartArea);
    root.appendChild(donutArea);
    root.appendChild(video);
  }

  /** Drag on a motion chart selects a time interval to brush. */
  private wireBrushPointer(chartArea: HTMLElement): void {
    let start: { x: number; svg: SVGSVGElement } | null = null;
    chartArea.addEventListener("mousedown", (event) => {
      const svg = (event.target as Element).closest<SVGSVGElement>(
        "svg[data-role='motion']",
      );
      if (svg) start = { x: (event as MouseEvent).offsetX, svg };
    });
    chartArea.addEventListener("mouseup", (event) => {
      if (!start) return;
      const { svg } = start;
      const width = Number(svg.getAttribute("width")) || 1;
      const t0 = Number(svg.dataset.t0);
      const t1 = Number(svg.dataset.t1);
      const toTime = (x: number) =>
        t0 + (Math.min(Math.max(x, 0), width) / width) * (t1 - t0);
      const a = Math.min(start.x, (event as MouseEvent).offsetX);
      const b = Math.max(start.x, (event as MouseEvent).offsetX);
      start = null;
      if (b - a >= 3) {
        const side = svg.dataset.side as Side;
        void this.brushMotion(side, toTime(a), toTime(b));
      }
    });
  }

  async openComparison(patientId: string, motionType: string): Promise<void> {
    const payload = await this.service.createComparison(patientId, motionType);
    this.usePayload(payload);
  }

  async brushMotion(side: Side, t0: number, t1: number): Promise<void> {
    await this.brush.brush(side, t0, t1);
  }

  private usePayload(payload: ComparisonPayload): void {
    this.payload = payload;
    this.state.handleId = payload.handle_id;
    this.state.acknowledgeTau(payload.threshold);
    this.slider.element.value = String(payload.threshold);
    this.view.render(payload);
    this.legend.render(payload);
  }

  private colorMap(): Record<string, string> {
    const colors: Record<string, string> = {};
    for (const muscle of this.payload?.muscles ?? []) {
      colors[muscle.name] = muscle.color;
    }
    return colors;
  }
}
