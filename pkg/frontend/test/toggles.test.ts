/** Detail-on-demand: everything off by default; each toggle adds exactly its
 * own overlay and nothing else. */

import { describe, expect, it } from 'vitest';

import { renderScene } from '../src/render/scene.js';
import { initialView, selectTrace, toggleDetail } from '../src/state.js';
import { loadFixture } from './helpers.js';

const payload = loadFixture();

const OVERLAY_SELECTORS = {
  events: '.event-tick',
  contention: '.molehill-bar',
  edges: '.edge-line',
  legend: '.legend',
} as const;

describe('defaults', () => {
  it('all four toggles start disabled', () => {
    const view = initialView();
    expect(view.toggles).toEqual({
      events: false,
      contention: false,
      edges: false,
      legend: false,
    });
  });

  it('initial scene contains no overlay elements', () => {
    const scene = renderScene(payload, initialView());
    for (const selector of Object.values(OVERLAY_SELECTORS)) {
      expect(scene.querySelectorAll(selector)).toHaveLength(0);
    }
    // the bare Gantt and the histogram strip are still there
    expect(scene.querySelectorAll('.lane').length).toBe(payload.lane_order.length);
    expect(scene.querySelectorAll('.histogram').length).toBe(
      payload.histograms.length,
    );
  });
});

describe('each toggle adds exactly its overlay', () => {
  const expectedCounts = {
    events: payload.trace.events.length,
    contention: Object.values(payload.contention).reduce(
      (n, t) => n + t.scaled.length,
      0,
    ),
    edges: Object.keys(payload.edge_frequencies).length,
    legend: 1,
  };

  for (const which of ['events', 'contention', 'edges', 'legend'] as const) {
    it(`toggle ${which}`, () => {
      const view = toggleDetail(initialView(), which);
      const scene = renderScene(payload, view);
      for (const [other, selector] of Object.entries(OVERLAY_SELECTORS)) {
        const count = scene.querySelectorAll(selector).length;
        if (other === which) {
          expect(count).toBe(expectedCounts[which]);
        } else {
          expect(count).toBe(0);
        }
      }
    });
  }
});

describe('toggle state', () => {
  it('toggling twice restores the original state', () => {
    const view = initialView();
    const twice = toggleDetail(toggleDetail(view, 'contention'), 'contention');
    expect(twice).toEqual(view);
  });

  it('updates are pure copies', () => {
    const view = initialView();
    const next = toggleDetail(view, 'events');
    expect(view.toggles.events).toBe(false);
    expect(next.toggles.events).toBe(true);
  });

  it('toggles persist across trace re-selection', () => {
    let view = toggleDetail(initialView(), 'edges');
    view = selectTrace(view, 'some-other-trace');
    expect(view.toggles.edges).toBe(true);
    expect(view.traceId).toBe('some-other-trace');
  });
});
