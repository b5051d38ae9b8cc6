import fs from 'node:fs';
import path from 'node:path';
import { fileURLToPath } from 'node:url';

import type { AggregatesPayload } from '../src/types.js';

const here = path.dirname(fileURLToPath(import.meta.url));

/** Recorded /api/trace/{id}/aggregates response from the backend. */
export function loadFixture(): AggregatesPayload {
  const raw = fs.readFileSync(path.join(here, 'fixtures', 'payload.json'), 'utf-8');
  return JSON.parse(raw) as AggregatesPayload;
}
