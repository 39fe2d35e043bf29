/**
 * Per-slot action index arithmetic, mirroring the server's encoding:
 *
 *   -1 forfeit, 0 pass, 1..6 switch to member N,
 *   7 + 20*gimmick + 5*(move-1) + target  for moves,
 *     target in {ally-a, ally-b, none, foe-a, foe-b},
 *     gimmick in {none, mega, z, dynamax, tera} (tera block: 87..106).
 *
 * This is the only piece of game encoding the client owns; legality always
 * comes from the server's masks.
 */

export const N_ACTIONS = 107;
export const FORFEIT = -1;
export const PASS = 0;

export const TARGETS = ["ally-a", "ally-b", "none", "foe-a", "foe-b"] as const;
export const GIMMICKS = ["none", "mega", "z", "dynamax", "tera"] as const;

export type Target = (typeof TARGETS)[number];
export type Gimmick = (typeof GIMMICKS)[number];

export type SlotAction =
  | { kind: "forfeit" }
  | { kind: "pass" }
  | { kind: "switch"; switchTo: number }
  | { kind: "move"; moveSlot: number; target: Target; gimmick: Gimmick };

export function encodeAction(action: SlotAction): number {
  switch (action.kind) {
    case "forfeit":
      return FORFEIT;
    case "pass":
      return PASS;
    case "switch":
      if (action.switchTo < 1 || action.switchTo > 6) {
        throw new RangeError(`switch target ${action.switchTo} out of range`);
      }
      return action.switchTo;
    case "move": {
      if (action.moveSlot < 1 || action.moveSlot > 4) {
        throw new RangeError(`move slot ${action.moveSlot} out of range`);
      }
      const b = GIMMICKS.indexOf(action.gimmick);
      const t = TARGETS.indexOf(action.target);
      return 7 + 20 * b + 5 * (action.moveSlot - 1) + t;
    }
  }
}

export function decodeAction(index: number): SlotAction {
  if (index === FORFEIT) return { kind: "forfeit" };
  if (index === PASS) return { kind: "pass" };
  if (index >= 1 && index <= 6) return { kind: "switch", switchTo: index };
  if (index >= 7 && index <= 106) {
    const offset = index - 7;
    const b = Math.floor(offset / 20);
    const rest = offset % 20;
    const m = Math.floor(rest / 5);
    const t = rest % 5;
    return {
      kind: "move",
      moveSlot: m + 1,
      target: TARGETS[t]!,
      gimmick: GIMMICKS[b]!,
    };
  }
  throw new RangeError(`action index ${index} out of range`);
}

export function isTera(index: number): boolean {
  return index >= 87 && index <= 106;
}

export function isSwitch(index: number): boolean {
  return index >= 1 && index <= 6;
}

/** Human-readable label for an action index given the acting mon's moves. */
export function describeAction(index: number, moves?: string[]): string {
  const a = decodeAction(index);
  switch (a.kind) {
    case "forfeit":
      return "forfeit";
    case "pass":
      return "pass";
    case "switch":
      return `switch to #${a.switchTo}`;
    case "move": {
      const name = moves?.[a.moveSlot - 1] ?? `move ${a.moveSlot}`;
      const tera = a.gimmick === "tera" ? " (tera)" : "";
      const target = a.target === "none" ? "" : ` → ${a.target}`;
      return `${name}${target}${tera}`;
    }
  }
}
