/** Time-to-pixel scaling and the visual encoding functions.
 *
 * Luminance and stroke width are the two popout channels: rarity maps to
 * darkness (frequency 1 renders white, frequency 0 black) and invocation
 * frequency maps to line width (common edges thick, rare edges hairline).
 * Both mappings are strictly monotone in frequency.
 */

export const EDGE_WIDTH_MIN = 1;
export const EDGE_WIDTH_MAX = 6;

export interface TimeScale {
  startUs: number;
  pxPerUs: number;
}

export function makeScale(startUs: number, endUs: number, widthPx: number): TimeScale {
  const span = Math.max(1, endUs - startUs);
  return { startUs, pxPerUs: widthPx / span };
}

export function toX(scale: TimeScale, ts: number): number {
  return (ts - scale.startUs) * scale.pxPerUs;
}

/** Grayscale CSS color for an event frequency; 0 -> black, 1 -> white. */
export function luminanceColor(frequency: number): string {
  const clamped = Math.min(1, Math.max(0, frequency));
  const channel = Math.round(clamped * 255);
  return `rgb(${channel},${channel},${channel})`;
}

/** Stroke width in px for an invocation-edge frequency. */
export function edgeWidth(frequency: number): number {
  const clamped = Math.min(1, Math.max(0, frequency));
  return EDGE_WIDTH_MIN + clamped * (EDGE_WIDTH_MAX - EDGE_WIDTH_MIN);
}

/** Log-scale bar height fraction: count 0 collapses to height 0. */
export function logHeightFraction(count: number, maxCount: number): number {
  if (maxCount <= 0) return 0;
  return Math.log10(count + 1) / Math.log10(maxCount + 1);
}
