/**
 * Performer connection. Wraps a WebSocket-shaped object so the browser
 * socket and the `ws` package are interchangeable (tests inject the
 * latter). Inputs are timestamped in milliseconds since the connection
 * opened and dispatched immediately, with no batching between frames.
 */

import {
  inputMessage,
  parseServerMessage,
  type InputAction,
  type ServerMessage,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open" | "close" | "error", listener: () => void): void;
  addEventListener(type: "message", listener: (event: { data: unknown }) => void): void;
}

export type SocketFactory = (url: string) => SocketLike;

export class PerformerClient {
  private socket: SocketLike | null = null;
  private startedAt = 0;
  private listeners: ((msg: ServerMessage) => void)[] = [];
  private readonly now: () => number;

  constructor(
    private readonly url: string,
    private readonly makeSocket: SocketFactory,
    now: () => number = () => Date.now(),
  ) {
    this.now = now;
  }

  onMessage(listener: (msg: ServerMessage) => void): void {
    this.listeners.push(listener);
  }

  connect(): Promise<void> {
    return new Promise((resolve, reject) => {
      const socket = this.makeSocket(this.url);
      let opened = false;
      socket.addEventListener("open", () => {
        opened = true;
        this.socket = socket;
        this.startedAt = this.now();
        resolve();
      });
      socket.addEventListener("error", () => {
        if (!opened) reject(new Error(`could not connect to ${this.url}`));
      });
      socket.addEventListener("close", () => {
        this.socket = null;
        if (!opened) reject(new Error(`connection closed before opening ${this.url}`));
      });
      socket.addEventListener("message", (event) => {
        const msg = parseServerMessage(String(event.data));
        for (const listener of this.listeners) {
          listener(msg);
        }
      });
    });
  }

  get connected(): boolean {
    return this.socket !== null;
  }

  /** Send one action stamped with the current session-relative time. */
  sendAction(action: InputAction): void {
    if (!this.socket) {
      throw new Error("not connected");
    }
    const at = Math.max(0, Math.round(this.now() - this.startedAt));
    this.socket.send(JSON.stringify(inputMessage(action, at)));
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
  }
}
