/**
 * Muscle legend with mute checkboxes.  Unchecking a muscle removes its
 * charts; the service recomputes the normalization so the remaining
 * charts rescale.  Labels sit next to the color swatches in every view.
 */

import type { ComparisonPayload, WorkbenchService } from "./types";
import type { ViewState } from "./viewState";

export class MuscleLegend {
  readonly element: HTMLElement;

  constructor(
    private service: WorkbenchService,
    private state: ViewState,
    private onPayload: (payload: ComparisonPayload) => void,
  ) {
    this.element = document.createElement("ul");
    this.element.className = "muscle-legend";
  }

  render(payload: ComparisonPayload): void {
    this.element.textContent = "";
    this.state.muted = new Set(payload.muted);
    for (const muscle of payload.muscles) {
      const item = document.createElement("li");
      item.dataset.muscle = muscle.name;
      const checkbox = document.createElement("input");
      checkbox.type = "checkbox";
      checkbox.checked = !payload.muted.includes(muscle.name);
      checkbox.addEventListener("change", () => {
        void this.toggle(muscle.name, checkbox.checked);
      });
      const swatch = document.createElement("span");
      swatch.className = "swatch";
      swatch.style.backgroundColor = muscle.color;
      const label = document.createElement("span");
      label.className = "label";
      label.textContent = muscle.name;
      item.appendChild(checkbox);
      item.appendChild(swatch);
      item.appendChild(label);
      this.element.appendChild(item);
    }
  }

  private async toggle(muscle: string, enabled: boolean): Promise<void> {
    if (!this.state.handleId) return;
    const payload = enabled
      ? await this.service.unmute(this.state.handleId, muscle)
      : await this.service.mute(this.state.handleId, muscle);
    this.render(payload);
    this.onPayload(payload);
  }
}
