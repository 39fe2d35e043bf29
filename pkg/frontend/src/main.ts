/**
 * Browser entry point: one session per tab against the match service.
 */
import { renderControlsHtml, renderViewHtml } from "./dom.js";
import { ChoiceBuilder, Slot } from "./selection.js";
import { ClientSession } from "./session.js";

const params = new URLSearchParams(window.location.search);
const wsUrl =
  params.get("ws") ?? `ws://${window.location.hostname}:8765/ws`;

const session = new ClientSession();
let builder: ChoiceBuilder | null = null;

const stateEl = document.getElementById("state")!;
const controlsEl = document.getElementById("controls")!;
const logEl = document.getElementById("log")!;
const bannerEl = document.getElementById("banner")!;
const scoreEl = document.getElementById("score")!;

const ws = new WebSocket(wsUrl);
ws.onopen = () => ws.send(JSON.stringify(session.open()));

function redraw(): void {
  bannerEl.textContent = session.banner ?? "";
  bannerEl.hidden = session.banner === null;
  scoreEl.textContent =
    `game ${Math.min(session.gamesPlayed + 1, session.gamesTotal)}` +
    `/${session.gamesTotal} — you ${session.score.you} : ` +
    `agent ${session.score.agent}` +
    (session.sessionComplete ? " — session complete" : "");
  if (session.view !== null) {
    stateEl.innerHTML = renderViewHtml(session.view);
  }
  logEl.textContent = session.eventLog.slice(-40).join("\n");
  drawControls();
}

function drawControls(): void {
  if (session.request === null || !session.canChoose || session.view === null) {
    controlsEl.innerHTML = "";
    return;
  }
  const own = session.view.sides.find((s) => s.own)!;
  const ownMoves = own.active.map((memberNo) =>
    memberNo !== null ? own.team[memberNo - 1]!.moves : null,
  );
  controlsEl.innerHTML = renderControlsHtml(session.request, ownMoves);
  builder = new ChoiceBuilder(session.request);
  controlsEl.querySelectorAll<HTMLButtonElement>("button.action").forEach(
    (button) => {
      button.onclick = () => {
        if (builder === null) return;
        const slot = Number(button.dataset.slot) as Slot;
        const index = Number(button.dataset.index);
        const ok = builder.select(slot, index);
        const hint = document.getElementById("hint")!;
        hint.textContent = ok ? "" : (builder.lastHint?.reason ?? "");
        controlsEl
          .querySelectorAll(`button.action[data-slot="${slot}"]`)
          .forEach((b) => b.classList.remove("selected"));
        if (ok) button.classList.add("selected");
        const submit = document.getElementById(
          "submit",
        ) as HTMLButtonElement;
        submit.disabled = !builder.complete;
        submit.onclick = () => {
          if (builder !== null && builder.complete) {
            ws.send(JSON.stringify(session.sent(builder.compose())));
            builder = null;
            drawControls();
          }
        };
      };
    },
  );
}

ws.onmessage = (event: MessageEvent<string>) => {
  session.receive(event.data);
  redraw();
};
ws.onclose = () => {
  if (!session.sessionComplete) {
    bannerEl.hidden = false;
    bannerEl.textContent =
      "disconnected — reload with the same token to resume";
  }
};
