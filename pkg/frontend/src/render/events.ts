/** Event overlay: a vertical tick per event at its timestamp, shaded by
 * cross-trace frequency so rare events pop out dark against the lane. */

import type { AggregatesPayload } from '../types.js';
import { TimeScale, luminanceColor, toX } from '../scale.js';
import { Layout, laneTop, svgEl } from './util.js';

export function renderEvents(
  payload: AggregatesPayload,
  scale: TimeScale,
  layout: Layout,
): SVGGElement {
  const overlay = svgEl('g', {}, 'events-overlay');
  const laneIndexByTask = new Map(payload.lane_order.map((id, i) => [id, i]));
  for (const event of payload.trace.events) {
    const laneIndex = laneIndexByTask.get(event.task_id);
    if (laneIndex === undefined) continue;
    const rarity = payload.event_rarities[event.event_id];
    const frequency = rarity ? rarity.frequency : 1;
    const x = layout.labelWidth + toX(scale, event.ts_us);
    const top = laneTop(layout, laneIndex);
    const tick = svgEl(
      'line',
      {
        x1: x,
        x2: x,
        y1: top + 1,
        y2: top + layout.laneHeight - 1,
        stroke: luminanceColor(frequency),
        'stroke-width': rarity && rarity.outlier ? 2 : 1,
        'data-event-id': event.event_id,
        'data-frequency': frequency,
        'data-outlier': rarity ? String(rarity.outlier) : 'false',
      },
      'event-tick',
    );
    overlay.appendChild(tick);
  }
  return overlay;
}
