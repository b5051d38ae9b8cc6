/** View state: selection, detail-on-demand toggles, hover, parameters.
 *
 * All four overlays (events, contention, edges, legend) start disabled and
 * only appear when explicitly toggled on.  State updates are pure copies so
 * renders stay a function of (payload, view).
 */

export type DetailToggle = 'events' | 'contention' | 'edges' | 'legend';

export interface ViewState {
  traceId: string | null;
  toggles: Record<DetailToggle, boolean>;
  hoveredLane: number | null;
  params: { bins: number; threshold: number; rarityCutoff: number };
  viewport: { startUs: number; endUs: number } | null;
}

export function initialView(): ViewState {
  return {
    traceId: null,
    toggles: { events: false, contention: false, edges: false, legend: false },
    hoveredLane: null,
    params: { bins: 30, threshold: 0.8, rarityCutoff: 0.1 },
    viewport: null,
  };
}

export function toggleDetail(view: ViewState, which: DetailToggle): ViewState {
  return {
    ...view,
    toggles: { ...view.toggles, [which]: !view.toggles[which] },
  };
}

export function selectTrace(view: ViewState, traceId: string): ViewState {
  // toggles persist across trace re-selection within a session
  return { ...view, traceId, hoveredLane: null, viewport: null };
}

export function hoverLane(view: ViewState, lane: number | null): ViewState {
  return { ...view, hoveredLane: lane };
}

/** Discards responses that arrive after a newer request was issued. */
export class StaleGuard {
  private latest = 0;

  begin(): number {
    return ++this.latest;
  }

  isCurrent(token: number): boolean {
    return token === this.latest;
  }
}
