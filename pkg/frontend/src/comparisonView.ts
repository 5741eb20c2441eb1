/**
 * Side-by-side muscle bundle comparison: affected limb in the left
 * column, unaffected in the right, one aligned row per muscle with the
 * same color on both sides.  Original power is an unfilled stroke, the
 * significance highlight a filled area.  Rows whose charts fall below
 * the threshold collapse and the survivors rescale to fill the space.
 */

import type {
  ChartModel,
  ComparisonPayload,
  MuscleMeta,
  SeriesModel,
  Side,
  VisibilityModel,
} from "./types";
import type { LayoutMode } from "./viewState";

const SVG_NS = "http://www.w3.org/2000/svg";
const SIDES: Side[] = ["affected", "unaffected"];

const CHART_WIDTH = 420;
const BODY_HEIGHT = 560;
const MOTION_HEIGHT = 70;

interface TimeDomain {
  t0: number;
  t1: number;
}

function svgEl<K extends keyof SVGElementTagNameMap>(tag: K): SVGElementTagNameMap[K] {
  return document.createElementNS(SVG_NS, tag);
}

function timeDomain(payload: ComparisonPayload): TimeDomain {
  let t0 = Infinity;
  let t1 = -Infinity;
  for (const chart of payload.charts) {
    if (chart.times.length) {
      t0 = Math.min(t0, chart.times[0]);
      t1 = Math.max(t1, chart.times[chart.times.length - 1]);
    }
  }
  const motion = payload.motion;
  for (const series of [motion?.affected, motion?.unaffected]) {
    if (series && series.times.length) {
      t0 = Math.min(t0, series.times[0]);
      t1 = Math.max(t1, series.times[series.times.length - 1]);
    }
  }
  if (!isFinite(t0)) return { t0: 0, t1: 1 };
  return { t0, t1 };
}

function xScale(domain: TimeDomain): (t: number) => number {
  const span = domain.t1 - domain.t0 || 1;
  return (t) => ((t - domain.t0) / span) * CHART_WIDTH;
}

function points(times: number[], values: number[], x: (t: number) => number,
                y: (v: number) => number): string {
  return times.map((t, i) => `${x(t).toFixed(2)},${y(values[i]).toFixed(2)}`).join(" ");
}

export class ComparisonView {
  private payload: ComparisonPayload | null = null;
  private layout: LayoutMode = "small-multiples";
  private domain: TimeDomain = { t0: 0, t1: 1 };

  constructor(private container: HTMLElement) {}

  render(payload: ComparisonPayload): void {
    this.payload = payload;
    this.domain = timeDomain(payload);
    this.applyVisibility(payload.visibility);
  }

  setLayout(mode: LayoutMode): void {
    if (this.payload && mode !== this.layout) {
      this.layout = mode;
      this.applyVisibility(this.payload.visibility);
    } else {
      this.layout = mode;
    }
  }

  /** Rebuild the chart area to match a service visibility report. */
  applyVisibility(visibility: VisibilityModel): void {
    const payload = this.payload;
    if (!payload) return;
    this.container.textContent = "";
    this.container.appendChild(this.header(payload));
    if (payload.unpaired.length) {
      this.container.appendChild(this.unpairedBadge(payload.unpaired));
    }
    if (payload.motion) {
      this.container.appendChild(this.motionRow(payload.motion));
    }
    const visible = new Map<string, boolean>();
    for (const chart of visibility.charts) {
      visible.set(`${chart.muscle}|${chart.side}`, chart.visible);
    }
    if (this.layout === "small-multiples") {
      this.renderSmallMultiples(payload, visibility, visible);
    } else {
      this.renderStacked(payload, visibility);
    }
  }

  /** Position (or hide) the playhead line on every chart. */
  setPlayhead(time: number | null): void {
    const x = time === null ? null : xScale(this.domain)(time);
    for (const line of this.container.querySelectorAll<SVGLineElement>("line.playhead")) {
      if (x === null) {
        line.setAttribute("visibility", "hidden");
      } else {
        line.setAttribute("visibility", "visible");
        line.setAttribute("x1", x.toFixed(2));
        line.setAttribute("x2", x.toFixed(2));
      }
    }
  }

  private header(payload: ComparisonPayload): HTMLElement {
    const header = document.createElement("div");
    header.className = "bundle-header";
    const title = document.createElement("span");
    title.className = "bundle-title";
    title.textContent = `${payload.patient_id} / ${payload.motion_type}`;
    header.appendChild(title);
    for (const side of SIDES) {
      const label = document.createElement("span");
      label.className = `column-label ${side}`;
      label.textContent = side;
      header.appendChild(label);
    }
    return header;
  }

  private unpairedBadge(unpaired: string[]): HTMLElement {
    const badge = document.createElement("div");
    badge.className = "unpaired-warning";
    badge.textContent = `unpaired: ${unpaired.join(", ")}`;
    return badge;
  }

  private motionRow(motion: NonNullable<ComparisonPayload["motion"]>): HTMLElement {
    const row = document.createElement("div");
    row.className = "motion-row";
    row.dataset.metric = motion.metric;
    for (const side of SIDES) {
      const series = side === "affected" ? motion.affected : motion.unaffected;
      const svg = this.chartSvg(side, MOTION_HEIGHT);
      svg.dataset.role = "motion";
      if (series && series.times.length) {
        svg.appendChild(this.motionLine(series, MOTION_HEIGHT));
      }
      svg.appendChild(this.playheadLine(MOTION_HEIGHT));
      row.appendChild(svg);
    }
    return row;
  }

  private motionLine(series: SeriesModel, height: number): SVGPolylineElement {
    const x = xScale(this.domain);
    const max = Math.max(...series.values, 1e-12);
    const y = (v: number) => height - (v / max) * height;
    const line = svgEl("polyline");
    line.setAttribute("class", "motion");
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", "#666");
    line.setAttribute("points", points(series.times, series.values, x, y));
    return line;
  }

  private chartSvg(side: Side, height: number): SVGSVGElement {
    const svg = svgEl("svg");
    svg.setAttribute("class", "chart");
    svg.setAttribute("width", String(CHART_WIDTH));
    svg.setAttribute("height", String(height));
    svg.dataset.side = side;
    svg.dataset.t0 = this.domain.t0.toFixed(6);
    svg.dataset.t1 = this.domain.t1.toFixed(6);
    return svg;
  }

  private playheadLine(height: number): SVGLineElement {
    const line = svgEl("line");
    line.setAttribute("class", "playhead");
    line.setAttribute("y1", "0");
    line.setAttribute("y2", String(height));
    line.setAttribute("stroke", "#222");
    line.setAttribute("visibility", "hidden");
    return line;
  }

  private renderSmallMultiples(
    payload: ComparisonPayload,
    visibility: VisibilityModel,
    visible: Map<string, boolean>,
  ): void {
    const surviving = payload.muscles.filter((m) =>
      visibility.surviving.includes(m.name),
    );
    const rowHeight = BODY_HEIGHT / Math.max(1, surviving.length);
    const charts = new Map<string, ChartModel>();
    for (const chart of payload.charts) {
      charts.set(`${chart.muscle}|${chart.side}`, chart);
    }
    for (const muscle of surviving) {
      const row = document.createElement("div");
      row.className = "muscle-row";
      row.dataset.muscle = muscle.name;
      row.dataset.group = muscle.group;
      row.style.height = `${rowHeight.toFixed(1)}px`;
      row.appendChild(this.rowLabel(muscle));
      const rowMax = Math.max(
        ...SIDES.flatMap((side) => charts.get(`${muscle.name}|${side}`)?.base ?? [0]),
        1e-12,
      );
      for (const side of SIDES) {
        const chart = charts.get(`${muscle.name}|${side}`);
        const svg = this.chartSvg(side, rowHeight - 8);
        svg.dataset.muscle = muscle.name;
        svg.dataset.visible = String(visible.get(`${muscle.name}|${side}`) ?? false);
        if (chart) {
          this.drawChart(svg, chart, muscle.color, rowHeight - 8, rowMax);
        }
        svg.appendChild(this.playheadLine(rowHeight - 8));
        row.appendChild(svg);
      }
      this.container.appendChild(row);
    }
  }

  private rowLabel(muscle: MuscleMeta): HTMLElement {
    const label = document.createElement("div");
    label.className = "muscle-label";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = muscle.color;
    const name = document.createElement("span");
    name.className = "name";
    name.textContent = muscle.name;
    label.appendChild(swatch);
    label.appendChild(name);
    return label;
  }

  private drawChart(
    svg: SVGSVGElement,
    chart: ChartModel,
    color: string,
    height: number,
    yMax: number,
  ): void {
    const x = xScale(this.domain);
    const y = (v: number) => height - (v / yMax) * height;
    if (!chart.times.length) return;
    const area = svgEl("polygon");
    area.setAttribute("class", "highlight");
    area.setAttribute("fill", color);
    area.setAttribute("fill-opacity", "0.6");
    const first = `${x(chart.times[0]).toFixed(2)},${height.toFixed(2)}`;
    const last = `${x(chart.times[chart.times.length - 1]).toFixed(2)},${height.toFixed(2)}`;
    area.setAttribute(
      "points",
      `${first} ${points(chart.times, chart.highlighted, x, y)} ${last}`,
    );
    svg.appendChild(area);
    const base = svgEl("polyline");
    base.setAttribute("class", "base");
    base.setAttribute("fill", "none");
    base.setAttribute("stroke", color);
    base.setAttribute("points", points(chart.times, chart.base, x, y));
    svg.appendChild(base);
  }

  private renderStacked(payload: ComparisonPayload, visibility: VisibilityModel): void {
    const surviving = payload.muscles.filter((m) =>
      visibility.surviving.includes(m.name),
    );
    const row = document.createElement("div");
    row.className = "stacked-row";
    row.style.height = `${BODY_HEIGHT}px`;
    const charts = new Map<string, ChartModel>();
    for (const chart of payload.charts) {
      charts.set(`${chart.muscle}|${chart.side}`, chart);
    }
    for (const side of SIDES) {
      const svg = this.chartSvg(side, BODY_HEIGHT);
      svg.classList.add("stacked");
      const sideCharts = surviving
        .map((m) => ({ muscle: m, chart: charts.get(`${m.name}|${side}`) }))
        .filter((e): e is { muscle: MuscleMeta; chart: ChartModel } => !!e.chart);
      if (sideCharts.length) {
        const times = sideCharts[0].chart.times;
        const cumulative = new Array<number>(times.length).fill(0);
        let stackMax = 1e-12;
        const layers: { muscle: MuscleMeta; lower: number[]; upper: number[] }[] = [];
        for (const { muscle, chart } of sideCharts) {
          const lower = cumulative.slice();
          for (let i = 0; i < cumulative.length; i++) {
            cumulative[i] += chart.base[i] ?? 0;
          }
          const upper = cumulative.slice();
          stackMax = Math.max(stackMax, ...upper);
          layers.push({ muscle, lower, upper });
        }
        const x = xScale(this.domain);
        const y = (v: number) => BODY_HEIGHT - (v / stackMax) * BODY_HEIGHT;
        for (const layer of layers) {
          const polygon = svgEl("polygon");
          polygon.setAttribute("class", "stack");
          polygon.dataset.muscle = layer.muscle.name;
          polygon.setAttribute("fill", layer.muscle.color);
          const forward = points(times, layer.upper, x, y);
          const backward = times
            .map((t, i) => `${x(t).toFixed(2)},${y(layer.lower[i]).toFixed(2)}`)
            .reverse()
            .join(" ");
          polygon.setAttribute("points", `${forward} ${backward}`);
          svg.appendChild(polygon);
        }
      }
      svg.appendChild(this.playheadLine(BODY_HEIGHT));
      row.appendChild(svg);
    }
    this.container.appendChild(row);
  }
}
