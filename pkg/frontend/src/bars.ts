import type { StateSnapshot } from './protocol.js';

// Queue bar chart model. Pure: numbers in, layout fractions out, so the
// DOM layer stays a dumb painter.

export interface BarView {
  ue: number;
  q: number;
  /** q / queue_limit; the chart height, 0..1 for in-range queues. */
  frac: number;
  drops: number;
  active: boolean;
  /** Queue at capacity: next arrival to this UE drops. */
  full: boolean;
  pending: boolean;
}

export function barViews(snap: StateSnapshot, pendingSelect: number | null): BarView[] {
  const limit = snap.queue_limit;
  return snap.q.map((q, i) => ({
    ue: i,
    q,
    frac: limit > 0 ? q / limit : 0,
    drops: snap.drops_cumulative[i] ?? 0,
    active: i === snap.active_ue,
    full: q >= limit,
    pending: pendingSelect !== null && i === pendingSelect && i !== snap.active_ue,
  }));
}
