/** Invocation-edge overlay: a line from parent lane to child lane at the
 * child's start time, stroke width coded by cross-trace frequency so rare
 * call paths render thin. */

import type { AggregatesPayload } from '../types.js';
import { TimeScale, edgeWidth, toX } from '../scale.js';
import { Layout, laneCenter, svgEl } from './util.js';

export function renderEdges(
  payload: AggregatesPayload,
  scale: TimeScale,
  layout: Layout,
): SVGGElement {
  const overlay = svgEl('g', {}, 'edges-overlay');
  const laneIndexByTask = new Map(payload.lane_order.map((id, i) => [id, i]));
  const tasks = new Map(payload.trace.tasks.map((t) => [t.task_id, t]));
  for (const [indexKey, frequency] of Object.entries(payload.edge_frequencies)) {
    const edge = payload.trace.edges[Number(indexKey)];
    if (!edge || !('task' in edge.src) || !('task' in edge.dst)) continue;
    const sourceLane = laneIndexByTask.get(edge.src.task);
    const targetLane = laneIndexByTask.get(edge.dst.task);
    const child = tasks.get(edge.dst.task);
    if (sourceLane === undefined || targetLane === undefined || !child) continue;
    const x = layout.labelWidth + toX(scale, child.start_us);
    overlay.appendChild(
      svgEl(
        'line',
        {
          x1: x,
          y1: laneCenter(layout, sourceLane),
          x2: x,
          y2: laneCenter(layout, targetLane),
          'stroke-width': edgeWidth(frequency.frequency),
          'data-edge-index': indexKey,
          'data-frequency': frequency.frequency,
          'data-outlier': String(frequency.outlier),
        },
        frequency.outlier ? 'edge-line edge-line-outlier' : 'edge-line',
      ),
    );
  }
  return overlay;
}
