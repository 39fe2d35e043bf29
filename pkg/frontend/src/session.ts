/**
 * Client-side session state machine.
 *
 * Transport-agnostic: feed it raw inbound text via `receive` and it returns
 * outbound messages to send (if any).  Invariants enforced here:
 * exactly one `choose` per `request`; resubmission only after an `error`;
 * a schema mismatch raises a visible protocol-error banner, never a crash.
 */
import {
  ChooseMessage,
  EndMessage,
  ErrorMessage,
  hello,
  HelloMessage,
  RequestMessage,
  ServerMessage,
  serverMessageSchema,
  SessionMessage,
  StateMessage,
} from "./protocol.js";
import { renderState, View } from "./view.js";

export interface SessionScore {
  you: number;
  agent: number;
}

export class ClientSession {
  token: string | null = null;
  gamesPlayed = 0;
  gamesTotal = 0;
  score: SessionScore = { you: 0, agent: 0 };
  sessionComplete = false;

  view: View | null = null;
  request: RequestMessage | null = null;
  /** true while a choose is in flight and unanswered */
  awaitingOutcome = false;
  eventLog: string[] = [];
  banner: string | null = null;
  lastError: ErrorMessage | null = null;
  lastEnd: EndMessage | null = null;

  /** Opening message for a new or resumed session. */
  open(token?: string): HelloMessage {
    return hello(token ?? this.token ?? undefined);
  }

  /** Whether the UI may submit a choice right now. */
  get canChoose(): boolean {
    return this.request !== null && !this.awaitingOutcome && !this.sessionComplete;
  }

  /** Mark a choice as sent; enforces one choose per request. */
  sent(message: ChooseMessage): ChooseMessage {
    if (!this.canChoose) {
      throw new Error("no pending request to answer");
    }
    this.awaitingOutcome = true;
    return message;
  }

  /** Handle one inbound frame; returns the parsed message or null on banner. */
  receive(raw: string): ServerMessage | null {
    let data: unknown;
    try {
      data = JSON.parse(raw);
    } catch {
      this.banner = "protocol error: server sent invalid JSON";
      return null;
    }
    const parsed = serverMessageSchema.safeParse(data);
    if (!parsed.success) {
      this.banner = `protocol error: ${parsed.error.issues[0]?.message ?? "schema mismatch"}`;
      return null;
    }
    this.apply(parsed.data);
    return parsed.data;
  }

  private apply(message: ServerMessage): void {
    switch (message.type) {
      case "session":
        this.applySession(message);
        break;
      case "state":
        this.view = renderState(message as StateMessage);
        break;
      case "request":
        this.request = message;
        this.awaitingOutcome = false;
        this.lastError = null;
        break;
      case "commit":
        // choice locked in; outcome arrives with the reveal
        break;
      case "reveal":
        this.eventLog.push(...message.events);
        this.request = null;
        this.awaitingOutcome = false;
        break;
      case "end":
        this.lastEnd = message;
        this.score = { ...message.score };
        this.gamesPlayed = message.games_played;
        this.sessionComplete = message.session_complete;
        if (this.sessionComplete) this.request = null;
        break;
      case "error":
        this.lastError = message;
        // the server re-issues the request after a rejected choose;
        // resubmission becomes possible once it arrives
        this.awaitingOutcome = false;
        break;
    }
  }

  private applySession(message: SessionMessage): void {
    this.token = message.token;
    this.gamesPlayed = message.games_played;
    this.gamesTotal = message.games_total;
    this.score = { ...message.score };
    this.sessionComplete = message.session_complete;
  }
}
