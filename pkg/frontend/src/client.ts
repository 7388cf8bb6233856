import {
  ClientKind,
  ErrorFrame,
  ResultFrame,
  ServerFrame,
  makeFrame,
  parseServerFrame,
} from "./protocol.js";

// Minimal surface of a WebSocket so tests can substitute a scripted stub.
export interface SocketLike {
  send(text: string): void;
  close(): void;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev: unknown) => void) | null;
}

export type ResultHandler = (body: any, requestId: string) => void;

/**
 * Request/reply correlation over one socket.
 *
 * Each outbound kind tracks its newest request_id; frames answering an
 * older id are dropped so no view ever renders superseded data. The server
 * applies the same rule and answers abandoned requests with code
 * "superseded", which is treated as a silent discard rather than an error.
 */
export class WorkbenchClient {
  private socket: SocketLike;
  private counter = 0;
  private latest = new Map<ClientKind, string>();
  private pendingKind = new Map<string, ClientKind>();
  private resultHandlers = new Map<ClientKind, ResultHandler[]>();
  private progressHandlers: ((fraction: number, kind: ClientKind) => void)[] = [];
  private errorHandlers: ((frame: ErrorFrame) => void)[] = [];
  staleCount = 0;

  constructor(socket: SocketLike) {
    this.socket = socket;
    socket.onmessage = (ev) => this.handleText(String(ev.data));
  }

  send(kind: ClientKind, payload: Record<string, unknown>): string {
    const id = `q${++this.counter}`;
    this.latest.set(kind, id);
    this.pendingKind.set(id, kind);
    this.socket.send(makeFrame(kind, id, payload));
    return id;
  }

  onResult(kind: ClientKind, fn: ResultHandler): void {
    const fns = this.resultHandlers.get(kind) ?? [];
    fns.push(fn);
    this.resultHandlers.set(kind, fns);
  }

  onProgress(fn: (fraction: number, kind: ClientKind) => void): void {
    this.progressHandlers.push(fn);
  }

  onError(fn: (frame: ErrorFrame) => void): void {
    this.errorHandlers.push(fn);
  }

  close(): void {
    this.socket.close();
  }

  handleText(text: string): void {
    let frame: ServerFrame;
    try {
      frame = parseServerFrame(text);
    } catch {
      return; // not ours to crash on; server frames are schema-checked there
    }
    const kind = this.pendingKind.get(frame.request_id);
    if (kind === undefined || this.latest.get(kind) !== frame.request_id) {
      if (frame.kind !== "progress") {
        this.staleCount++;
        this.pendingKind.delete(frame.request_id);
      }
      return;
    }
    if (frame.kind === "progress") {
      for (const fn of this.progressHandlers) fn(frame.payload.fraction, kind);
      return;
    }
    this.pendingKind.delete(frame.request_id);
    if (frame.kind === "error") {
      if (frame.payload.code === "superseded") {
        this.staleCount++;
        return;
      }
      for (const fn of this.errorHandlers) fn(frame);
      return;
    }
    this.dispatchResult(frame);
  }

  private dispatchResult(frame: ResultFrame): void {
    const fns = this.resultHandlers.get(frame.payload.answers) ?? [];
    for (const fn of fns) fn(frame.payload.body, frame.request_id);
  }
}
