/**
 * Scripted chooser used by the end-to-end run and tests: picks a legal
 * joint action from the server masks, honoring the documented joint
 * constraints, so every emitted `choose` passes server validation.
 */
import { isSwitch, isTera, PASS } from "./actions.js";
import { RequestMessage } from "./protocol.js";

export function jointLegal(
  a: number,
  b: number,
  forbidPassPass: boolean,
): boolean {
  if (isSwitch(a) && isSwitch(b) && a === b) return false;
  if (isTera(a) && isTera(b)) return false;
  if (forbidPassPass && a === PASS && b === PASS) return false;
  return true;
}

/** Deterministic pick: the (seed)th valid pair in mask order. */
export function pickJoint(
  request: RequestMessage,
  seed = 0,
): [number, number] {
  const pairs: [number, number][] = [];
  for (const a of request.legal_a) {
    for (const b of request.legal_b) {
      if (jointLegal(a, b, request.forbid_pass_pass)) {
        pairs.push([a, b]);
      }
    }
  }
  if (pairs.length === 0) {
    throw new Error("no legal joint action; server masks are inconsistent");
  }
  return pairs[((seed % pairs.length) + pairs.length) % pairs.length]!;
}
