/**
 * Brushing a time interval on the motion chart: asks the service for the
 * proportion summary, shows it as a donut, and arms video playback at
 * the locator's offset-adjusted times.
 */

import { renderDonut } from "./donut";
import type { BrushResponse, Side, WorkbenchService } from "./types";
import type { PlayheadSync } from "./videoSync";
import type { ViewState } from "./viewState";

export class BrushController {
  private last: { response: BrushResponse; side: Side; t0: number; t1: number } | null =
    null;

  constructor(
    private service: WorkbenchService,
    private state: ViewState,
    private donutContainer: HTMLElement,
    private playhead: PlayheadSync,
    private colors: () => Record<string, string>,
  ) {}

  async brush(side: Side, t0: number, t1: number): Promise<BrushResponse> {
    if (!this.state.handleId) throw new Error("no active comparison");
    const response = await this.service.brush(this.state.handleId, side, t0, t1);
    this.last = { response, side, t0, t1 };
    renderDonut(this.donutContainer, response.summary, this.colors());
    return response;
  }

  /** Start synced playback of the armed brush, if its video exists. */
  play(): boolean {
    if (!this.last || !this.last.response.video) return false;
    this.playhead.playBrush(this.last.response.video, this.last.t0, this.last.t1);
    return true;
  }
}
