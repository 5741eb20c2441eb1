/**
 * Fixed-radius donut of brushed muscle proportions.  Every percentage
 * comes straight from the service summary, and each arc's share is kept
 * on the element for inspection.  Muscle names are always written next
 * to their color swatches.
 */

import type { ProportionModel } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";
const R_OUT = 42;
const R_IN = 22;

function arcPath(cx: number, cy: number, a0: number, a1: number): string {
  if (a1 - a0 >= 2 * Math.PI - 1e-9) {
    a1 = a0 + 2 * Math.PI - 1e-6;
  }
  const large = a1 - a0 > Math.PI ? 1 : 0;
  const p = (r: number, a: number) =>
    `${(cx + r * Math.cos(a)).toFixed(2)} ${(cy + r * Math.sin(a)).toFixed(2)}`;
  return (
    `M ${p(R_OUT, a0)} A ${R_OUT} ${R_OUT} 0 ${large} 1 ${p(R_OUT, a1)} ` +
    `L ${p(R_IN, a1)} A ${R_IN} ${R_IN} 0 ${large} 0 ${p(R_IN, a0)} Z`
  );
}

export function renderDonut(
  container: HTMLElement,
  summary: ProportionModel,
  colors: Record<string, string>,
): void {
  container.textContent = "";
  container.className = "donut";
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", "100");
  svg.setAttribute("height", "100");
  let angle = -Math.PI / 2;
  for (const [muscle, share] of Object.entries(summary.shares)) {
    if (share <= 0) continue;
    const a1 = angle + share * 2 * Math.PI;
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("class", "arc");
    path.setAttribute("d", arcPath(50, 50, angle, a1));
    path.setAttribute("fill", colors[muscle] ?? "#999");
    path.dataset.muscle = muscle;
    path.dataset.share = String(share);
    path.dataset.a0 = String(angle);
    path.dataset.a1 = String(a1);
    svg.appendChild(path);
    angle = a1;
  }
  container.appendChild(svg);

  const legend = document.createElement("ul");
  legend.className = "donut-legend";
  for (const [muscle, share] of Object.entries(summary.shares)) {
    const item = document.createElement("li");
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = colors[muscle] ?? "#999";
    const label = document.createElement("span");
    label.className = "label";
    label.textContent = `${muscle} ${(share * 100).toFixed(1)}%`;
    item.appendChild(swatch);
    item.appendChild(label);
    legend.appendChild(item);
  }
  container.appendChild(legend);
}
