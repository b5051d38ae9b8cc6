export const SVG_NS = 'http://www.w3.org/2000/svg';

export function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
  className = '',
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  if (className) el.setAttribute('class', className);
  return el;
}

/** Pixel geometry shared by every layer. */
export interface Layout {
  width: number;
  stripHeight: number;
  histWidth: number;
  histGap: number;
  rowHeight: number;
  laneHeight: number;
  molehillHeight: number;
  labelWidth: number;
}

export const DEFAULT_LAYOUT: Layout = {
  width: 960,
  stripHeight: 64,
  histWidth: 72,
  histGap: 10,
  rowHeight: 40,
  laneHeight: 18,
  molehillHeight: 14,
  labelWidth: 220,
};

export function laneTop(layout: Layout, laneIndex: number): number {
  return layout.stripHeight + laneIndex * layout.rowHeight + layout.molehillHeight;
}

export function molehillTop(layout: Layout, laneIndex: number): number {
  return layout.stripHeight + laneIndex * layout.rowHeight;
}

export function laneCenter(layout: Layout, laneIndex: number): number {
  return laneTop(layout, laneIndex) + layout.laneHeight / 2;
}
