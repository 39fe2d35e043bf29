/**
 * Minimal DOM rendering of the view model.  Presentation only: everything
 * displayed comes from `View` / `RequestMessage`; no game rules live here.
 */
import { describeAction } from "./actions.js";
import { RequestMessage } from "./protocol.js";
import { MonViewModel, SideViewModel, View } from "./view.js";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function hpBar(mon: MonViewModel): string {
  const width = Math.max(0, Math.min(100, mon.hpPercent));
  const level = width > 50 ? "high" : width > 20 ? "mid" : "low";
  return (
    `<div class="hp-bar"><div class="hp-fill hp-${level}"` +
    ` style="width:${width}%"></div></div>` +
    `<span class="hp-num">${width.toFixed(0)}%</span>`
  );
}

function boostChips(mon: MonViewModel): string {
  if (mon.boosts === null) return "";
  return Object.entries(mon.boosts)
    .map(([stat, v]) => {
      const sign = v > 0 ? "+" : "";
      return `<span class="chip boost">${esc(stat)} ${sign}${v}</span>`;
    })
    .join("");
}

function monCard(mon: MonViewModel): string {
  const classes = ["mon", mon.appearance];
  if (mon.activeSlot !== null) classes.push("active");
  const status =
    mon.status !== null ? `<span class="chip status">${esc(mon.status)}</span>` : "";
  const tera = mon.teraActive
    ? `<span class="chip tera">tera${mon.teraType !== null ? `: ${esc(mon.teraType)}` : ""}</span>`
    : "";
  const moves =
    mon.moves !== null && mon.moves.length > 0
      ? `<div class="moves">${mon.moves.map((m) => esc(m)).join(" · ")}</div>`
      : "";
  const ability = mon.ability !== null ? `<div class="detail">ability: ${esc(mon.ability)}</div>` : "";
  const item =
    mon.item !== undefined
      ? `<div class="detail">item: ${mon.item !== null ? esc(mon.item) : "none"}</div>`
      : "";
  return (
    `<div class="${classes.join(" ")}">` +
    `<div class="name">${esc(mon.species)}${mon.fainted ? " ✕" : ""}</div>` +
    hpBar(mon) +
    status +
    tera +
    boostChips(mon) +
    moves +
    ability +
    item +
    `</div>`
  );
}

function sidePanel(side: SideViewModel): string {
  const conditions = side.conditions
    .map(
      (c) =>
        `<span class="chip condition">${esc(c.name)} (${c.turnsRemaining})</span>`,
    )
    .join("");
  return (
    `<section class="side ${side.own ? "own" : "foe"}">` +
    `<h2>${side.own ? "you" : "opponent"}${side.teraUsed ? " — tera used" : ""}</h2>` +
    `<div class="conditions">${conditions}</div>` +
    `<div class="team">${side.team.map(monCard).join("")}</div>` +
    `</section>`
  );
}

export function renderViewHtml(view: View): string {
  const field = view.fieldChips
    .map(
      (c) =>
        `<span class="chip field">${esc(c.name)} (${c.turnsRemaining})</span>`,
    )
    .join("");
  const winner =
    view.winner !== null
      ? `<div class="winner">winner: player ${view.winner}</div>`
      : "";
  return (
    `<header><span class="phase">${esc(view.phase)}</span>` +
    ` <span class="turn">turn ${view.turn}</span> ${field}</header>` +
    winner +
    view.sides.map(sidePanel).join("")
  );
}

export function renderControlsHtml(
  request: RequestMessage,
  ownMoves: (string[] | null)[],
): string {
  const slotButtons = (legal: number[], slot: number): string =>
    legal
      .map(
        (i) =>
          `<button class="action" data-slot="${slot}" data-index="${i}">` +
          `${esc(describeAction(i, ownMoves[slot] ?? undefined))}</button>`,
      )
      .join("");
  return (
    `<div class="controls">` +
    `<div class="slot" data-slot="0">${slotButtons(request.legal_a, 0)}</div>` +
    `<div class="slot" data-slot="1">${slotButtons(request.legal_b, 1)}</div>` +
    `<button id="submit" disabled>submit</button>` +
    `<span id="hint"></span>` +
    `</div>`
  );
}
