import type { ClientCommand } from './protocol.js';
import { encodeCommand } from './protocol.js';

export interface SocketHandlers {
  onRaw(text: string): void;
  onStatus(status: 'connecting' | 'open' | 'closed'): void;
}

export interface SocketHandle {
  send(cmd: ClientCommand): boolean;
  close(): void;
}

/**
 * WebSocket wrapper with automatic reconnect. Backoff doubles from 500 ms
 * to an 8 s cap and resets on a successful open; the server rebroadcasts
 * full state every event, so a reconnect needs no catch-up protocol.
 */
export function openSocket(url: string, handlers: SocketHandlers): SocketHandle {
  let ws: WebSocket | null = null;
  let closedByUs = false;
  let retryMs = 500;
  let timer: ReturnType<typeof setTimeout> | null = null;

  function connect() {
    handlers.onStatus('connecting');
    ws = new WebSocket(url);

    ws.onopen = () => {
      retryMs = 500;
      handlers.onStatus('open');
    };

    ws.onmessage = (evt) => {
      handlers.onRaw(String(evt.data));
    };

    ws.onclose = () => {
      ws = null;
      if (closedByUs) return;
      handlers.onStatus('closed');
      timer = setTimeout(connect, retryMs);
      retryMs = Math.min(retryMs * 2, 8000);
    };

    ws.onerror = () => {
      // onclose fires after onerror; reconnect is handled there
    };
  }

  connect();

  return {
    send(cmd: ClientCommand): boolean {
      if (!ws || ws.readyState !== WebSocket.OPEN) return false;
      ws.send(encodeCommand(cmd));
      return true;
    },
    close() {
      closedByUs = true;
      if (timer) clearTimeout(timer);
      ws?.close();
    },
  };
}
