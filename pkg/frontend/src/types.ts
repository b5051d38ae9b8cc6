/** Wire types for the travista HTTP API. */

export interface TaskDoc {
  task_id: string;
  task_type: string;
  process_id: string;
  thread_id?: string;
  start_us: number;
  end_us: number;
  annotations?: Record<string, string>;
}

export interface EventDoc {
  event_id: string;
  task_id: string;
  label: string;
  ts_us: number;
}

export type EndpointRef = { task: string } | { event: string };

export interface EdgeDoc {
  src: EndpointRef;
  dst: EndpointRef;
  kind: 'invocation' | 'happened_before';
}

export interface TraceDoc {
  trace_id: string;
  tasks: TaskDoc[];
  events: EventDoc[];
  edges: EdgeDoc[];
}

export interface HistogramWire {
  task_id: string;
  task_type: string;
  bin_edges: number[];
  counts: number[];
  total: number;
  highlight_bin: number | null;
  highlight_out_of_range: boolean;
}

export interface EventRarityWire {
  task_type: string;
  label: string;
  occurrence_count: number;
  instance_count: number;
  frequency: number;
  outlier: boolean;
}

export interface EdgeFrequencyWire {
  parent_type: string;
  child_type: string;
  count: number;
  frequency: number;
  outlier: boolean;
}

export interface ContentionWire {
  task_id: string;
  bucket_ms: number;
  t0_ms: number;
  raw_counts: number[];
  scaled: number[];
  threshold_flags: boolean[];
}

export interface AggregatesPayload {
  trace_id: string;
  trace: TraceDoc;
  lane_order: string[];
  histograms: HistogramWire[];
  event_rarities: Record<string, EventRarityWire>;
  edge_frequencies: Record<string, EdgeFrequencyWire>;
  contention: Record<string, ContentionWire>;
  timings: Record<string, number>;
  params: { bins: number; threshold: number; rarity_cutoff: number };
}

export interface TraceSummaryWire {
  trace_id: string;
  root_type: string;
  start_us: number;
  duration_us: number;
  task_count: number;
  event_count: number;
}
