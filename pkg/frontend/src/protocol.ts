// Wire types for the demo-bridge WebSocket. One JSON object per message,
// discriminated by "kind". The server is authoritative; the client never
// derives queue lengths, battery, or drops on its own.

export interface Hello {
  kind: 'hello';
  n_ues: number;
  sectors: number;
  queue_limit: number;
}

export interface StateSnapshot {
  kind: 'state';
  frame: number;
  event: number;
  q: number[];
  queue_limit: number;
  active_ue: number;
  uav_sector: number;
  ue_sectors: number[];
  ue_positions: [number, number][];
  battery: number;
  drops_cumulative: number[];
  clock: number;
}

export interface ErrorMsg {
  kind: 'error';
  message: string;
}

export type ServerMessage = Hello | StateSnapshot | ErrorMsg;

export type ClientCommand =
  | { kind: 'select'; ue: number }
  | { kind: 'pause' }
  | { kind: 'resume' }
  | { kind: 'speed'; value: number };

/**
 * Parse one raw frame into a typed message, or null if it is not one of
 * the three server kinds. Field checks are shallow: the server is trusted,
 * the guard only keeps a malformed frame from reaching the render path.
 */
export function parseServerMessage(raw: string): ServerMessage | null {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof obj !== 'object' || obj === null) return null;
  const msg = obj as Record<string, unknown>;
  switch (msg.kind) {
    case 'hello':
      if (typeof msg.n_ues !== 'number' || typeof msg.sectors !== 'number') return null;
      return msg as unknown as Hello;
    case 'state':
      if (!Array.isArray(msg.q) || !Array.isArray(msg.ue_sectors)) return null;
      return msg as unknown as StateSnapshot;
    case 'error':
      if (typeof msg.message !== 'string') return null;
      return msg as unknown as ErrorMsg;
    default:
      return null;
  }
}

export function encodeCommand(cmd: ClientCommand): string {
  return JSON.stringify(cmd);
}
