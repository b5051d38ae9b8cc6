/** Scene composition: Gantt lanes + histogram strip always; events,
 * molehills, edges, and legend only when their toggle is on.  The scene is
 * a pure function of (payload, view); hover linking mutates classes only. */

import type { AggregatesPayload } from '../types.js';
import type { ViewState } from '../state.js';
import { makeScale } from '../scale.js';
import { renderEdges } from './edges.js';
import { renderEvents } from './events.js';
import { renderGantt } from './gantt.js';
import { renderHistogramStrip } from './histograms.js';
import { renderLegend } from './legend.js';
import { renderMolehills } from './molehills.js';
import { DEFAULT_LAYOUT, Layout, svgEl } from './util.js';

export function renderScene(
  payload: AggregatesPayload,
  view: ViewState,
  layout: Layout = DEFAULT_LAYOUT,
): SVGSVGElement {
  const lanes = payload.lane_order.length;
  const height = layout.stripHeight + lanes * layout.rowHeight + 8;
  const svg = svgEl('svg', {
    width: layout.width,
    height,
    viewBox: `0 0 ${layout.width} ${height}`,
  }, 'travista-scene');

  const range = view.viewport ?? {
    startUs: Math.min(...payload.trace.tasks.map((t) => t.start_us)),
    endUs: Math.max(...payload.trace.tasks.map((t) => t.end_us)),
  };
  const scale = makeScale(range.startUs, range.endUs, layout.width - layout.labelWidth - 8);

  svg.appendChild(renderHistogramStrip(payload, layout));
  svg.appendChild(renderGantt(payload, scale, layout));
  if (view.toggles.contention) svg.appendChild(renderMolehills(payload, scale, layout));
  if (view.toggles.events) svg.appendChild(renderEvents(payload, scale, layout));
  if (view.toggles.edges) svg.appendChild(renderEdges(payload, scale, layout));
  if (view.toggles.legend) svg.appendChild(renderLegend(payload, layout));

  if (view.hoveredLane !== null) applyHover(svg, view.hoveredLane);
  return svg;
}

export function applyHover(scene: SVGSVGElement, laneIndex: number | null): void {
  for (const el of scene.querySelectorAll('.lane-hovered, .histogram-hovered')) {
    el.classList.remove('lane-hovered', 'histogram-hovered');
  }
  if (laneIndex === null) return;
  scene
    .querySelector(`.lane[data-lane-index="${laneIndex}"]`)
    ?.classList.add('lane-hovered');
  scene
    .querySelector(`.histogram[data-lane-index="${laneIndex}"]`)
    ?.classList.add('histogram-hovered');
}

/** Two-way hover linking: entering a histogram highlights its lane and
 * entering a lane highlights its histogram. */
export function wireHover(
  scene: SVGSVGElement,
  onHover?: (laneIndex: number | null) => void,
): void {
  const bind = (el: Element) => {
    const laneIndex = Number(el.getAttribute('data-lane-index'));
    el.addEventListener('mouseenter', () => {
      applyHover(scene, laneIndex);
      onHover?.(laneIndex);
    });
    el.addEventListener('mouseleave', () => {
      applyHover(scene, null);
      onHover?.(null);
    });
  };
  scene.querySelectorAll('.histogram').forEach(bind);
  scene.querySelectorAll('.lane').forEach(bind);
}
