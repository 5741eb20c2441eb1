/**
 * In-memory stand-in for the comparison service, built from the payload
 * semantics documented in docs/api.md.  Tests treat its responses as the
 * service truth that the UI must mirror.
 */

import type {
  BrushResponse,
  CatalogFilters,
  CatalogResponse,
  ChartModel,
  ComparisonPayload,
  ConfigModel,
  MuscleMeta,
  PresentationModel,
  SessionModel,
  Side,
  VisibilityModel,
  WorkbenchService,
} from "../src/types";

export const MUSCLES: MuscleMeta[] = [
  { name: "BIC", group: "pushing", color: "#1f78b4" },
  { name: "TRI", group: "pushing", color: "#a6cee3" },
  { name: "PT", group: "forearm", color: "#33a02c" },
  { name: "PQ", group: "forearm", color: "#b2df8a" },
  { name: "UT", group: "back", color: "#e31a1c" },
  { name: "LT", group: "back", color: "#fb9a99" },
  { name: "FDS", group: "finger", color: "#ff7f00" },
  { name: "EDC", group: "finger", color: "#fdbf6f" },
];

const TIMES = Array.from({ length: 10 }, (_, i) => i * 0.1);
const BUMP = [0, 1, 2, 3, 4, 5, 4, 3, 2, 1];

// per-(muscle, side) raw significance scores and base amplitudes
const SCORES: Record<string, { affected: number; unaffected: number }> = {
  BIC: { affected: 0.3, unaffected: 0.2 },
  TRI: { affected: 0.25, unaffected: 0.15 },
  PT: { affected: 0, unaffected: 0 },
  PQ: { affected: 0, unaffected: 0 },
  UT: { affected: 1.44, unaffected: 0.44 },
  LT: { affected: 0, unaffected: 0 },
  FDS: { affected: 0, unaffected: 0 },
  EDC: { affected: 0, unaffected: 0 },
};
const AMPLITUDES: Record<string, { affected: number; unaffected: number }> = {
  BIC: { affected: 1.4, unaffected: 1.0 },
  TRI: { affected: 1.3, unaffected: 1.0 },
  PT: { affected: 1.0, unaffected: 1.0 },
  PQ: { affected: 1.0, unaffected: 1.0 },
  UT: { affected: 3.0, unaffected: 1.0 },
  LT: { affected: 1.0, unaffected: 1.0 },
  FDS: { affected: 1.0, unaffected: 1.0 },
  EDC: { affected: 1.0, unaffected: 1.0 },
};

const SIDES: Side[] = ["affected", "unaffected"];

function defer<T>(): { promise: Promise<T>; resolve: (value: T) => void } {
  let resolve!: (value: T) => void;
  const promise = new Promise<T>((r) => {
    resolve = r;
  });
  return { promise, resolve };
}

export class FakeService implements WorkbenchService {
  calls: { method: string; args: unknown[] }[] = [];
  /** When true, setThreshold responses wait until resolveNext() is called. */
  manualThreshold = false;
  private pendingThreshold: { resolve: (v: VisibilityModel) => void; tau: number }[] = [];

  tau = 0;
  muted = new Set<string>();
  sessions = new Map<string, SessionModel>();
  presentations = new Map<string, PresentationModel>();
  unpaired: string[] = [];

  private log(method: string, ...args: unknown[]): void {
    this.calls.push({ method, args });
  }

  callsTo(method: string): { method: string; args: unknown[] }[] {
    return this.calls.filter((c) => c.method === method);
  }

  charts(muted: Set<string>, tau: number): { charts: ChartModel[]; hMax: number } {
    const hMaxScore = Math.max(
      ...MUSCLES.filter((m) => !muted.has(m.name)).flatMap((m) => [
        SCORES[m.name].affected,
        SCORES[m.name].unaffected,
      ]),
      0,
    );
    const charts: ChartModel[] = [];
    let hMax = 0;
    for (const muscle of MUSCLES) {
      for (const side of SIDES) {
        const amp = AMPLITUDES[muscle.name][side];
        const base = BUMP.map((v) => v * amp);
        const norm =
          muted.has(muscle.name) || hMaxScore <= 0
            ? 0
            : SCORES[muscle.name][side] / hMaxScore;
        const highlighted = base.map((v) => v * norm);
        if (!muted.has(muscle.name)) {
          hMax = Math.max(hMax, ...highlighted);
        }
        charts.push({
          muscle: muscle.name,
          side,
          times: TIMES,
          base,
          highlighted,
          visible: false,
        });
      }
    }
    const cutoff = tau * hMax;
    for (const chart of charts) {
      if (muted.has(chart.muscle)) {
        chart.visible = false;
      } else if (tau <= 0) {
        chart.visible = true;
      } else if (cutoff > 0) {
        chart.visible = chart.highlighted.some((h) => h >= cutoff);
      } else {
        chart.visible = chart.highlighted.some((h) => h > 0);
      }
    }
    return { charts, hMax };
  }

  visibilityAt(tau: number, muted = this.muted): VisibilityModel {
    const { charts, hMax } = this.charts(muted, tau);
    const collapsed: string[] = [];
    const surviving: string[] = [];
    for (const muscle of MUSCLES) {
      const pair = charts.filter((c) => c.muscle === muscle.name);
      if (pair.some((c) => c.visible)) {
        surviving.push(muscle.name);
      } else {
        collapsed.push(muscle.name);
      }
    }
    return {
      tau,
      h_max: hMax,
      charts: charts.map((c) => ({ muscle: c.muscle, side: c.side, visible: c.visible })),
      collapsed,
      surviving,
    };
  }

  payload(): ComparisonPayload {
    const { charts } = this.charts(this.muted, this.tau);
    const hMaxScore = Math.max(
      ...MUSCLES.filter((m) => !this.muted.has(m.name)).flatMap((m) => [
        SCORES[m.name].affected,
        SCORES[m.name].unaffected,
      ]),
      0,
    );
    return {
      handle_id: "fixture-handle",
      patient_id: "P03",
      motion_type: "wrist_rotation",
      config: {
        window_s: 0.1,
        hop_s: 0.01,
        k_min: 2,
        k_max: 8,
        tau: this.tau,
        motion_metric: "displacement",
        muted: [...this.muted].sort(),
      },
      muscles: MUSCLES,
      charts,
      scores: MUSCLES.flatMap((m) =>
        SIDES.map((side) => ({
          muscle: m.name,
          side,
          divergence: SCORES[m.name][side],
          skewness: 0,
          skew_weight: 1,
          score: SCORES[m.name][side],
          normalized_score:
            this.muted.has(m.name) || hMaxScore <= 0
              ? 0
              : SCORES[m.name][side] / hMaxScore,
        })),
      ),
      visibility: this.visibilityAt(this.tau),
      motion: {
        metric: "displacement",
        affected: { times: TIMES, values: BUMP.map((v) => v * 0.05) },
        unaffected: { times: TIMES, values: BUMP.map((v) => v * 0.06) },
      },
      threshold: this.tau,
      muted: [...this.muted].sort(),
      unpaired: this.unpaired,
    };
  }

  catalog(filters: CatalogFilters): Promise<CatalogResponse> {
    this.log("catalog", filters);
    const patients = ["P01", "P02", "P03"];
    const motionsByPatient: Record<string, string[]> = {
      P01: ["shoulder_flexion"],
      P02: ["elbow_extension"],
      P03: ["wrist_rotation"],
    };
    const motions = filters.patient
      ? motionsByPatient[filters.patient] ?? []
      : Object.values(motionsByPatient).flat();
    return Promise.resolve({
      items: [],
      facets: {
        patient: patients,
        motion: motions,
        side: ["affected", "unaffected"],
      },
      total: 0,
      offset: 0,
      limit: 100,
    });
  }

  createComparison(
    patientId: string,
    motionType: string,
    config?: ConfigModel,
  ): Promise<ComparisonPayload> {
    this.log("createComparison", patientId, motionType, config);
    this.tau = config?.tau ?? 0;
    this.muted = new Set(config?.muted ?? []);
    return Promise.resolve(this.payload());
  }

  getComparison(handleId: string): Promise<ComparisonPayload> {
    this.log("getComparison", handleId);
    return Promise.resolve(this.payload());
  }

  setThreshold(handleId: string, tau: number): Promise<VisibilityModel> {
    this.log("setThreshold", handleId, tau);
    if (this.manualThreshold) {
      const deferred = defer<VisibilityModel>();
      this.pendingThreshold.push({
        resolve: deferred.resolve,
        tau,
      });
      return deferred.promise;
    }
    this.tau = tau;
    return Promise.resolve(this.visibilityAt(tau));
  }

  /** Resolve the oldest pending manual threshold request. */
  resolveNextThreshold(): void {
    const next = this.pendingThreshold.shift();
    if (!next) throw new Error("no pending threshold request");
    this.tau = next.tau;
    next.resolve(this.visibilityAt(next.tau));
  }

  mute(handleId: string, muscle: string): Promise<ComparisonPayload> {
    this.log("mute", handleId, muscle);
    this.muted.add(muscle);
    return Promise.resolve(this.payload());
  }

  unmute(handleId: string, muscle: string): Promise<ComparisonPayload> {
    this.log("unmute", handleId, muscle);
    this.muted.delete(muscle);
    return Promise.resolve(this.payload());
  }

  truncate(
    handleId: string,
    side: Side | "both",
    t0: number,
    t1: number,
  ): Promise<ComparisonPayload> {
    this.log("truncate", handleId, side, t0, t1);
    return Promise.resolve(this.payload());
  }

  brush(handleId: string, side: Side, t0: number, t1: number): Promise<BrushResponse> {
    this.log("brush", handleId, side, t0, t1);
    return Promise.resolve({
      summary: {
        side,
        interval: [t0, t1],
        shares: { BIC: 0.5, TRI: 0.3, UT: 0.2 },
      },
      video:
        side === "affected"
          ? { path: "/videos/p03.mp4", start_s: t0 + 0.8, end_s: t1 + 0.8 }
          : null,
    });
  }

  getSession(id: string): Promise<SessionModel> {
    this.log("getSession", id);
    const session = this.sessions.get(id);
    return session
      ? Promise.resolve(structuredClone(session))
      : Promise.reject(new Error("not_found"));
  }

  putSession(id: string, session: SessionModel): Promise<{ id: string }> {
    this.log("putSession", id);
    this.sessions.set(id, structuredClone(session));
    return Promise.resolve({ id });
  }

  getPresentation(id: string): Promise<PresentationModel> {
    this.log("getPresentation", id);
    const doc = this.presentations.get(id);
    return doc
      ? Promise.resolve(structuredClone(doc))
      : Promise.reject(new Error("not_found"));
  }

  putPresentation(id: string, doc: PresentationModel): Promise<{ id: string }> {
    this.log("putPresentation", id);
    const docId = id || `doc-${this.presentations.size + 1}`;
    this.presentations.set(docId, structuredClone({ ...doc, id: docId }));
    return Promise.resolve({ id: docId });
  }

  exportPresentation(
    id: string,
    format: "document" | "static-render",
  ): Promise<string> {
    this.log("exportPresentation", id, format);
    if (!this.presentations.has(id)) return Promise.reject(new Error("not_found"));
    return Promise.resolve(
      format === "static-render" ? `<svg data-doc="${id}"/>` : JSON.stringify(this.presentations.get(id)),
    );
  }
}

export function sessionFixture(): SessionModel {
  return {
    id: "s1",
    owner: "dr-a",
    truncations: [],
    comparisons: [
      { patient_id: "P03", motion_type: "wrist_rotation", tau: 0.3, muted: [] },
    ],
    brushes: [
      {
        id: "b1",
        patient_id: "P03",
        motion_type: "wrist_rotation",
        side: "affected",
        t0: 0.2,
        t1: 0.7,
        note: "peak",
      },
    ],
    created: "2024-06-01T10:00:00",
    modified: "2024-06-01T10:00:00",
  };
}
