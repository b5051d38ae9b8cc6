/** Molehills: a per-millisecond bar chart above each lane showing scaled
 * contention; the trace-wide maximum reaches full height and buckets over
 * the threshold render red. */

import type { AggregatesPayload } from '../types.js';
import { TimeScale, toX } from '../scale.js';
import { Layout, molehillTop, svgEl } from './util.js';

export function renderMolehills(
  payload: AggregatesPayload,
  scale: TimeScale,
  layout: Layout,
): SVGGElement {
  const overlay = svgEl('g', {}, 'molehills-overlay');
  const laneIndexByTask = new Map(payload.lane_order.map((id, i) => [id, i]));
  for (const [taskId, timeline] of Object.entries(payload.contention)) {
    const laneIndex = laneIndexByTask.get(taskId);
    if (laneIndex === undefined) continue;
    const baseline = molehillTop(layout, laneIndex) + layout.molehillHeight;
    const holder = svgEl('g', { 'data-task-id': taskId }, 'molehill');
    const bucketUs = timeline.bucket_ms * 1000;
    timeline.scaled.forEach((scaled, bucketIndex) => {
      const bucketStartUs = (timeline.t0_ms + bucketIndex) * bucketUs;
      const x = layout.labelWidth + toX(scale, bucketStartUs);
      const width = Math.max(0.5, toX(scale, bucketStartUs + bucketUs) - toX(scale, bucketStartUs) - 0.25);
      const height = scaled * layout.molehillHeight;
      const flagged = timeline.threshold_flags[bucketIndex];
      holder.appendChild(
        svgEl(
          'rect',
          {
            x,
            y: baseline - height,
            width,
            height,
            'data-bucket-index': bucketIndex,
            'data-raw': timeline.raw_counts[bucketIndex],
            'data-flagged': String(flagged),
          },
          flagged ? 'molehill-bar molehill-bar-red' : 'molehill-bar',
        ),
      );
    });
    overlay.appendChild(holder);
  }
  return overlay;
}
