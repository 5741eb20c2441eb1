/**
 * Faceted dataset query: three exclusive drop-downs whose options are
 * the facet values the service reports for the other selections.
 */

import type { CatalogFilters, CatalogResponse, WorkbenchService } from "./types";
import type { ViewState } from "./viewState";

const FACETS = ["patient", "motion", "side"] as const;
type Facet = (typeof FACETS)[number];

export class QueryPanel {
  readonly element: HTMLElement;
  private selects = new Map<Facet, HTMLSelectElement>();

  constructor(
    private service: WorkbenchService,
    private state: ViewState,
    private onResult: (result: CatalogResponse) => void,
  ) {
    this.element = document.createElement("div");
    this.element.className = "query-panel";
    for (const facet of FACETS) {
      const select = document.createElement("select");
      select.dataset.facet = facet;
      select.addEventListener("change", () => {
        const value = select.value;
        (this.state.filters as Record<string, string | undefined>)[facet] =
          value || undefined;
        void this.refresh();
      });
      this.selects.set(facet, select);
      this.element.appendChild(select);
    }
  }

  async refresh(): Promise<CatalogResponse> {
    const result = await this.service.catalog(this.state.filters);
    for (const facet of FACETS) {
      this.populate(facet, result.facets[facet] ?? []);
    }
    this.onResult(result);
    return result;
  }

  private populate(facet: Facet, values: string[]): void {
    const select = this.selects.get(facet)!;
    const current = (this.state.filters as Record<string, string | undefined>)[facet];
    select.textContent = "";
    const blank = document.createElement("option");
    blank.value = "";
    blank.textContent = `(any ${facet})`;
    select.appendChild(blank);
    for (const value of values) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value;
      select.appendChild(option);
    }
    select.value = current && values.includes(current) ? current : "";
  }

  selected(): CatalogFilters {
    return { ...this.state.filters };
  }
}
