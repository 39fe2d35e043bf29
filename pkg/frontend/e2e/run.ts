/**
 * Scripted end-to-end run: plays a full session (default 5 games) against
 * a served agent and exits nonzero if the server rejects any `choose` or
 * the session fails to complete.
 *
 * Usage: node dist/e2e/run.js [ws://127.0.0.1:8765/ws]
 */
import WebSocket from "ws";

import { pickJoint } from "../src/autoplay.js";
import { ClientSession } from "../src/session.js";

const url = process.argv[2] ?? "ws://127.0.0.1:8765/ws";
const session = new ClientSession();
const ws = new WebSocket(url);

let rejections = 0;
let decisions = 0;
const deadline = setTimeout(() => {
  console.error("e2e: timed out before session completion");
  process.exit(2);
}, 300_000);

ws.on("open", () => {
  ws.send(JSON.stringify(session.open()));
});

ws.on("message", (raw: WebSocket.RawData) => {
  const message = session.receive(raw.toString());
  if (session.banner !== null) {
    console.error(`e2e: ${session.banner}`);
    process.exit(3);
  }
  if (message === null) return;
  if (message.type === "error") {
    rejections += 1;
    console.error(`e2e: server rejected a message: ${message.message}`);
  }
  if (message.type === "end") {
    console.log(
      `e2e: game ${message.games_played}/${message.games_total} — ` +
        `you ${message.score.you} : agent ${message.score.agent}`,
    );
  }
  if (session.sessionComplete) {
    clearTimeout(deadline);
    ws.close();
    const ok = rejections === 0;
    console.log(
      `e2e: session complete after ${decisions} decisions, ` +
        `${rejections} rejections`,
    );
    process.exit(ok ? 0 : 1);
  }
  if (message.type === "request" && session.canChoose) {
    const [a, b] = pickJoint(message, decisions);
    decisions += 1;
    ws.send(JSON.stringify(session.sent({
      type: "choose",
      proto: 1,
      actions: [a, b],
    })));
  }
});

ws.on("error", (err: Error) => {
  console.error(`e2e: websocket error: ${err.message}`);
  process.exit(4);
});
