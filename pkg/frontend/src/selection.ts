/**
 * Pending joint-choice state for one decision point.
 *
 * Selectability derives solely from the server's legality masks; the only
 * client-side additions are the documented joint usability guards, which
 * the server re-validates anyway: no duplicate switch target, at most one
 * tera per turn, and no pass/pass on lone-replacement turns.
 */
import { isSwitch, isTera, PASS } from "./actions.js";
import { ChooseMessage, choose, RequestMessage } from "./protocol.js";

export type Slot = 0 | 1;

export interface JointGuardHint {
  slot: Slot;
  index: number;
  reason: string;
}

export class ChoiceBuilder {
  readonly legal: [Set<number>, Set<number>];
  readonly forbidPassPass: boolean;
  private pending: [number | null, number | null] = [null, null];
  lastHint: JointGuardHint | null = null;

  constructor(request: RequestMessage) {
    this.legal = [new Set(request.legal_a), new Set(request.legal_b)];
    this.forbidPassPass = request.forbid_pass_pass;
  }

  /** Mask-derived selectability; an index the mask forbids is unselectable. */
  isSelectable(slot: Slot, index: number): boolean {
    return this.legal[slot].has(index);
  }

  selected(slot: Slot): number | null {
    return this.pending[slot];
  }

  /**
   * Try to select an action for a slot.  Returns true when accepted;
   * otherwise `lastHint` carries the inline explanation.
   */
  select(slot: Slot, index: number): boolean {
    this.lastHint = null;
    if (!this.isSelectable(slot, index)) {
      this.lastHint = { slot, index, reason: "not legal this turn" };
      return false;
    }
    const other = this.pending[1 - slot] as number | null;
    if (other !== null) {
      if (isSwitch(index) && isSwitch(other) && index === other) {
        this.lastHint = {
          slot,
          index,
          reason: "both slots cannot switch to the same member",
        };
        return false;
      }
      if (isTera(index) && isTera(other)) {
        this.lastHint = {
          slot,
          index,
          reason: "only one slot may terastallize per turn",
        };
        return false;
      }
      if (this.forbidPassPass && index === PASS && other === PASS) {
        this.lastHint = {
          slot,
          index,
          reason: "a replacement must be sent out this turn",
        };
        return false;
      }
    }
    this.pending[slot] = index;
    return true;
  }

  clear(slot: Slot): void {
    this.pending[slot] = null;
  }

  /** Submit stays disabled until both slots have an accepted selection. */
  get complete(): boolean {
    return this.pending[0] !== null && this.pending[1] !== null;
  }

  compose(): ChooseMessage {
    if (!this.complete) {
      throw new Error("selection incomplete; submit should be disabled");
    }
    return choose(this.pending[0]!, this.pending[1]!);
  }
}
