/** Application shell: trace picker (longest first), detail toggles, scene.
 *
 * One aggregates request is in flight per selection; responses belonging to
 * a superseded selection are discarded via StaleGuard tokens.
 */

import { TravistaClient } from './api.js';
import { renderScene, wireHover } from './render/scene.js';
import {
  DetailToggle,
  StaleGuard,
  ViewState,
  hoverLane,
  initialView,
  selectTrace,
  toggleDetail,
} from './state.js';
import type { AggregatesPayload } from './types.js';

const TOGGLES: DetailToggle[] = ['events', 'contention', 'edges', 'legend'];

export class App {
  private view: ViewState = initialView();
  private payload: AggregatesPayload | null = null;
  private guard = new StaleGuard();

  constructor(
    private client: TravistaClient,
    private root: HTMLElement,
  ) {}

  async boot(): Promise<void> {
    this.root.innerHTML = `
      <div class="topbar">
        <strong>travista</strong>
        <span class="toggles"></span>
        <span class="status"></span>
      </div>
      <div class="main">
        <ul class="trace-list"></ul>
        <div class="scene-holder"></div>
      </div>`;
    const holder = this.root.querySelector('.toggles') as HTMLElement;
    for (const which of TOGGLES) {
      const label = document.createElement('label');
      const box = document.createElement('input');
      box.type = 'checkbox';
      box.checked = this.view.toggles[which];
      box.dataset.toggle = which;
      box.addEventListener('change', () => {
        this.view = toggleDetail(this.view, which);
        this.renderSceneOnly();
      });
      label.appendChild(box);
      label.appendChild(document.createTextNode(which));
      holder.appendChild(label);
    }
    await this.refreshList();
  }

  private status(text: string): void {
    const el = this.root.querySelector('.status');
    if (el) el.textContent = text;
  }

  async refreshList(): Promise<void> {
    const list = this.root.querySelector('.trace-list') as HTMLElement;
    try {
      const summaries = await this.client.listTraces();
      list.innerHTML = '';
      for (const summary of summaries) {
        const item = document.createElement('li');
        item.dataset.traceId = summary.trace_id;
        item.textContent = `${summary.trace_id}  ${summary.root_type}  ${(
          summary.duration_us / 1000
        ).toFixed(1)} ms`;
        item.addEventListener('click', () => void this.select(summary.trace_id));
        list.appendChild(item);
      }
      this.status(`${summaries.length} traces, longest first`);
    } catch (error) {
      this.status(`cannot list traces: ${error}`);
    }
  }

  async select(traceId: string): Promise<void> {
    this.view = selectTrace(this.view, traceId);
    const token = this.guard.begin();
    this.status(`loading ${traceId} ...`);
    try {
      const payload = await this.client.getAggregates(traceId, this.view.params);
      if (!this.guard.isCurrent(token)) return; // superseded selection
      this.payload = payload;
      const timing = payload.timings;
      this.status(
        `${traceId}: raw ${Math.round(timing.raw_trace_us)}us, ` +
          `event ${Math.round(timing.event_agg_us)}us, ` +
          `edge ${Math.round(timing.edge_agg_us)}us, ` +
          `contention ${Math.round(timing.contention_agg_us)}us`,
      );
      this.renderSceneOnly();
    } catch (error) {
      if (this.guard.isCurrent(token)) this.status(`load failed: ${error}`);
    }
  }

  renderSceneOnly(): void {
    if (!this.payload) return;
    const holder = this.root.querySelector('.scene-holder') as HTMLElement;
    holder.innerHTML = '';
    const scene = renderScene(this.payload, this.view);
    wireHover(scene, (lane) => {
      this.view = hoverLane(this.view, lane);
    });
    holder.appendChild(scene);
  }
}

function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get('api');
  return param ?? window.location.origin.replace(/:\d+$/, ':8714');
}

if (typeof document !== 'undefined' && document.getElementById('travista-root')) {
  const app = new App(
    new TravistaClient(apiBase()),
    document.getElementById('travista-root') as HTMLElement,
  );
  void app.boot();
}
