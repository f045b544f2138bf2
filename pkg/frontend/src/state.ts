import type { Hello, ServerMessage, StateSnapshot } from './protocol.js';

export type ConnStatus = 'connecting' | 'open' | 'closed';

/**
 * Client-side view state. Holds only what the server sent plus the local
 * selection echo: a clicked UE is "pending" until a snapshot confirms it
 * as active_ue, because renders must reflect server truth exclusively.
 */
export class UiStore {
  status: ConnStatus = 'connecting';
  hello: Hello | null = null;
  snapshot: StateSnapshot | null = null;
  pendingSelect: number | null = null;
  lastError = '';
  paused = false;

  handleMessage(msg: ServerMessage): void {
    switch (msg.kind) {
      case 'hello':
        this.hello = msg;
        break;
      case 'state':
        this.snapshot = msg;
        if (this.pendingSelect !== null && msg.active_ue === this.pendingSelect) {
          this.pendingSelect = null;
        }
        break;
      case 'error':
        this.lastError = msg.message;
        break;
    }
  }

  requestSelect(ue: number): void {
    this.pendingSelect = ue;
  }

  setStatus(s: ConnStatus): void {
    this.status = s;
    if (s !== 'open') this.pendingSelect = null;
  }
}
