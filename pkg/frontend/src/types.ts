/** Payload shapes of the comparison service (see docs/api.md). */

export type Side = "affected" | "unaffected";

export interface CatalogItem {
  patient_id: string;
  motion_type: string;
  side: Side;
  sample_rate_hz: number;
  duration_s: number;
  muscle_count: number;
  has_motion: boolean;
  has_video: boolean;
}

export interface CatalogResponse {
  items: CatalogItem[];
  facets: Record<string, string[]>;
  total: number;
  offset: number;
  limit: number;
}

export interface ConfigModel {
  window_s?: number;
  hop_s?: number;
  k_min?: number;
  k_max?: number;
  tau?: number;
  motion_metric?: string;
  muted?: string[];
}

export interface MuscleMeta {
  name: string;
  group: string;
  color: string;
}

export interface ChartModel {
  muscle: string;
  side: Side;
  times: number[];
  base: number[];
  highlighted: number[];
  visible: boolean;
}

export interface ScoreModel {
  muscle: string;
  side: Side;
  divergence: number;
  skewness: number;
  skew_weight: number;
  score: number;
  normalized_score: number;
}

export interface ChartVisibility {
  muscle: string;
  side: Side;
  visible: boolean;
}

export interface VisibilityModel {
  tau: number;
  h_max: number;
  charts: ChartVisibility[];
  collapsed: string[];
  surviving: string[];
}

export interface SeriesModel {
  times: number[];
  values: number[];
}

export interface MotionModel {
  metric: string;
  affected?: SeriesModel | null;
  unaffected?: SeriesModel | null;
}

export interface ComparisonPayload {
  handle_id: string;
  patient_id: string;
  motion_type: string;
  config: Required<Omit<ConfigModel, "muted">> & { muted: string[] };
  muscles: MuscleMeta[];
  charts: ChartModel[];
  scores: ScoreModel[];
  visibility: VisibilityModel;
  motion?: MotionModel | null;
  threshold: number;
  muted: string[];
  unpaired: string[];
}

export interface ProportionModel {
  side: Side;
  interval: [number, number];
  shares: Record<string, number>;
}

export interface VideoLocator {
  path: string;
  start_s: number;
  end_s: number;
}

export interface BrushResponse {
  summary: ProportionModel;
  video?: VideoLocator | null;
}

export interface TruncationModel {
  patient_id: string;
  motion_type: string;
  side: Side;
  t0: number;
  t1: number;
}

export interface ComparisonStateModel {
  patient_id: string;
  motion_type: string;
  tau: number;
  muted: string[];
}

export interface BrushModel {
  id: string;
  patient_id: string;
  motion_type: string;
  side: Side;
  t0: number;
  t1: number;
  note: string;
}

export interface SessionModel {
  id: string;
  owner: string;
  truncations: TruncationModel[];
  comparisons: ComparisonStateModel[];
  brushes: BrushModel[];
  created: string;
  modified: string;
}

export interface GridCellModel {
  row: string;
  column: string;
  session_id: string;
  brush_id: string;
  side: Side;
  interval: [number, number];
  shares: Record<string, number>;
  annotation: string;
}

export interface PresentationModel {
  id: string;
  title: string;
  subtitle: string;
  cells: GridCellModel[];
}

export interface CatalogFilters {
  patient?: string;
  motion?: string;
  side?: string;
}

/** Everything the workbench needs from the backend; numbers on screen
 *  always originate from one of these responses. */
export interface WorkbenchService {
  catalog(filters: CatalogFilters): Promise<CatalogResponse>;
  createComparison(
    patientId: string,
    motionType: string,
    config?: ConfigModel,
  ): Promise<ComparisonPayload>;
  getComparison(handleId: string): Promise<ComparisonPayload>;
  setThreshold(handleId: string, tau: number): Promise<VisibilityModel>;
  mute(handleId: string, muscle: string): Promise<ComparisonPayload>;
  unmute(handleId: string, muscle: string): Promise<ComparisonPayload>;
  truncate(
    handleId: string,
    side: Side | "both",
    t0: number,
    t1: number,
  ): Promise<ComparisonPayload>;
  brush(handleId: string, side: Side, t0: number, t1: number): Promise<BrushResponse>;
  getSession(id: string): Promise<SessionModel>;
  putSession(id: string, session: SessionModel): Promise<{ id: string }>;
  getPresentation(id: string): Promise<PresentationModel>;
  putPresentation(id: string, doc: PresentationModel): Promise<{ id: string }>;
  exportPresentation(id: string, format: "document" | "static-render"): Promise<string>;
}
