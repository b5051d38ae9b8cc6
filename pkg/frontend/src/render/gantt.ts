/** Gantt lanes: one blue bar per task, top-to-bottom in payload lane order,
 * length proportional to duration. */

import type { AggregatesPayload } from '../types.js';
import { TimeScale, toX } from '../scale.js';
import { Layout, laneTop, svgEl } from './util.js';

export function renderGantt(
  payload: AggregatesPayload,
  scale: TimeScale,
  layout: Layout,
): SVGGElement {
  const group = svgEl('g', {}, 'gantt');
  const tasks = new Map(payload.trace.tasks.map((t) => [t.task_id, t]));
  payload.lane_order.forEach((taskId, laneIndex) => {
    const task = tasks.get(taskId);
    if (!task) return;
    const top = laneTop(layout, laneIndex);
    const x = layout.labelWidth + toX(scale, task.start_us);
    const width = Math.max(1, toX(scale, task.end_us) - toX(scale, task.start_us));
    const lane = svgEl('g', { 'data-lane-index': laneIndex, 'data-task-id': taskId }, 'lane');
    lane.appendChild(
      svgEl(
        'rect',
        { x, y: top, width, height: layout.laneHeight, rx: 2 },
        'lane-rect',
      ),
    );
    const label = svgEl(
      'text',
      { x: 4, y: top + layout.laneHeight - 5, 'font-size': 11 },
      'lane-label',
    );
    label.textContent = `${task.task_type} (${(
      (task.end_us - task.start_us) / 1000
    ).toFixed(2)} ms)`;
    lane.appendChild(label);
    group.appendChild(lane);
  });
  return group;
}
