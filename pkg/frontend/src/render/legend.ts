/** Legend: the four aggregate encodings with the active parameter values. */

import type { AggregatesPayload } from '../types.js';
import { EDGE_WIDTH_MAX, EDGE_WIDTH_MIN } from '../scale.js';
import { Layout, svgEl } from './util.js';

export function renderLegend(payload: AggregatesPayload, layout: Layout): SVGGElement {
  const legend = svgEl('g', {}, 'legend');
  const { threshold, rarity_cutoff: rarityCutoff, bins } = payload.params;
  const entries = [
    `event tick luminance = label frequency (black = rare, cutoff ${rarityCutoff})`,
    `edge width = invocation frequency (${EDGE_WIDTH_MIN}px rare .. ${EDGE_WIDTH_MAX}px common)`,
    `molehill height = concurrent requests, scaled to trace max (1ms buckets)`,
    `red molehill bucket = scaled contention > threshold ${threshold}`,
    `histograms: ${bins} bins, log-scale counts, accent = this trace's bin`,
  ];
  entries.forEach((text, i) => {
    const line = svgEl(
      'text',
      { x: layout.width - 440, y: 14 + i * 13, 'font-size': 10 },
      'legend-entry',
    );
    line.textContent = text;
    legend.appendChild(line);
  });
  return legend;
}
