/**
 * Significance threshold slider.  Drags are debounced (~60 ms) and sent
 * through a single-flight gate; the view and state only ever reflect
 * acknowledged service responses, so the on-screen collapse state always
 * equals the service's visibility report.
 */

import { LatestGate } from "./client";
import type { VisibilityModel, WorkbenchService } from "./types";
import type { ViewState } from "./viewState";

export const SLIDER_DEBOUNCE_MS = 60;

export class ThresholdSlider {
  readonly element: HTMLInputElement;
  private gate: LatestGate<number, VisibilityModel>;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private service: WorkbenchService,
    private state: ViewState,
    private onVisibility: (visibility: VisibilityModel) => void,
  ) {
    this.element = document.createElement("input");
    this.element.type = "range";
    this.element.min = "0";
    this.element.max = "1";
    this.element.step = "0.01";
    this.element.value = "0";
    this.element.className = "threshold-slider";
    this.element.addEventListener("input", () => {
      this.schedule(Number(this.element.value));
    });
    this.gate = new LatestGate(
      (tau: number) => {
        if (!this.state.handleId) {
          return Promise.reject(new Error("no active comparison"));
        }
        return this.service.setThreshold(this.state.handleId, tau);
      },
      (visibility) => {
        this.state.acknowledgeTau(visibility.tau);
        this.onVisibility(visibility);
      },
    );
  }

  /** Debounced entry point; also used directly by tests and keyboard input. */
  schedule(tau: number): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.gate.submit(tau);
    }, SLIDER_DEBOUNCE_MS);
  }

  get busy(): boolean {
    return this.timer !== null || this.gate.pending;
  }
}
