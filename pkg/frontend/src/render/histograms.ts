/** Histogram strip: one latency distribution per lane, ordered left-to-right
 * to match the lanes top-to-bottom.  Bar heights are log10(count+1); the bin
 * holding the focal task is the accented bar. */

import type { AggregatesPayload } from '../types.js';
import { logHeightFraction } from '../scale.js';
import { Layout, svgEl } from './util.js';

export function renderHistogramStrip(
  payload: AggregatesPayload,
  layout: Layout,
): SVGGElement {
  const strip = svgEl('g', {}, 'histogram-strip');
  const barAreaHeight = layout.stripHeight - 16;
  payload.histograms.forEach((hist, laneIndex) => {
    const left = layout.labelWidth + laneIndex * (layout.histWidth + layout.histGap);
    const holder = svgEl(
      'g',
      { 'data-lane-index': laneIndex, 'data-task-type': hist.task_type },
      'histogram',
    );
    const maxCount = Math.max(...hist.counts);
    const barWidth = layout.histWidth / hist.counts.length;
    hist.counts.forEach((count, binIndex) => {
      const fraction = logHeightFraction(count, maxCount);
      const height = fraction * barAreaHeight;
      const highlighted = hist.highlight_bin === binIndex;
      holder.appendChild(
        svgEl(
          'rect',
          {
            x: left + binIndex * barWidth,
            y: 4 + (barAreaHeight - height),
            width: Math.max(0.5, barWidth - 0.5),
            height,
            'data-bin-index': binIndex,
            'data-count': count,
          },
          highlighted ? 'hist-bar hist-bar-highlight' : 'hist-bar',
        ),
      );
    });
    if (hist.highlight_out_of_range) {
      const marker = svgEl(
        'text',
        { x: left + layout.histWidth - 8, y: 12, 'font-size': 10 },
        'hist-out-of-range',
      );
      marker.textContent = '!';
      holder.appendChild(marker);
    }
    strip.appendChild(holder);
  });
  return strip;
}
