/** Mutable UI state; the tau value always mirrors the last response the
 *  service acknowledged, never an optimistic local guess. */

import type { BrushModel, CatalogFilters } from "./types";

export type LayoutMode = "small-multiples" | "stacked";

export class ViewState {
  filters: CatalogFilters = {};
  handleId: string | null = null;
  layoutMode: LayoutMode = "small-multiples";
  tau = 0;
  muted = new Set<string>();
  brushes: BrushModel[] = [];
  playheadTime: number | null = null;

  acknowledgeTau(tau: number): void {
    this.tau = tau;
  }
}
