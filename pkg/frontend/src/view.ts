/**
 * Pure view model: turns a `state` snapshot into display data and back.
 *
 * `renderState` keeps every wire field (the round-trip test reconstructs
 * the snapshot from the view, so nothing can be silently dropped) and adds
 * presentation-only derivations: HP percentages, bench appearance
 * (solid = revealed, translucent = unrevealed, greyed = fainted), and
 * condition / field chips with their timers.
 */
import { MonView, SideView, StateMessage } from "./protocol.js";

export type BenchAppearance = "solid" | "translucent" | "greyed";

export interface MonViewModel {
  species: string;
  hpPercent: number; // 0..100, for the HP bar
  hpFraction: number;
  status: string | null;
  fainted: boolean;
  revealed: boolean;
  teraActive: boolean;
  activeSlot: number | null;
  appearance: BenchAppearance;
  boosts: Record<string, number> | null; // active mons only
  moves: string[] | null; // null when nothing is known
  ability: string | null;
  item: string | null | undefined; // undefined = unknown, null = no item
  teraType: string | null;
  stats: Record<string, number> | null; // own side only
}

export interface ConditionChip {
  name: string;
  turnsRemaining: number;
}

export interface SideViewModel {
  player: number;
  own: boolean;
  team: MonViewModel[];
  chosen: number[];
  active: (number | null)[];
  teraUsed: boolean;
  conditions: ConditionChip[];
}

export interface FieldChip {
  kind: "weather" | "terrain";
  name: string;
  turnsRemaining: number;
}

export interface View {
  phase: StateMessage["phase"];
  turn: number;
  fieldChips: FieldChip[];
  weather: string | null;
  weatherTurns: number;
  terrain: string | null;
  terrainTurns: number;
  sides: SideViewModel[];
  winner: number | null;
}

export function benchAppearance(mon: MonView): BenchAppearance {
  if (mon.fainted) return "greyed";
  return mon.revealed ? "solid" : "translucent";
}

function renderMon(mon: MonView): MonViewModel {
  return {
    species: mon.species,
    hpPercent: Math.round(mon.hp_fraction * 10000) / 100,
    hpFraction: mon.hp_fraction,
    status: mon.status,
    fainted: mon.fainted,
    revealed: mon.revealed,
    teraActive: mon.tera_active,
    activeSlot: mon.active_slot,
    appearance: benchAppearance(mon),
    boosts: mon.boosts !== undefined ? { ...mon.boosts } : null,
    moves: mon.moves !== undefined ? [...mon.moves] : null,
    ability: mon.ability ?? null,
    item: mon.item,
    teraType: mon.tera_type ?? null,
    stats: mon.stats !== undefined ? { ...mon.stats } : null,
  };
}

function renderSide(side: SideView): SideViewModel {
  return {
    player: side.player,
    own: side.own,
    team: side.team.map(renderMon),
    chosen: [...side.chosen],
    active: [...side.active],
    teraUsed: side.tera_used,
    conditions: Object.entries(side.conditions).map(([name, turns]) => ({
      name,
      turnsRemaining: turns,
    })),
  };
}

export function renderState(snapshot: StateMessage): View {
  const fieldChips: FieldChip[] = [];
  if (snapshot.weather !== null) {
    fieldChips.push({
      kind: "weather",
      name: snapshot.weather,
      turnsRemaining: snapshot.weather_turns,
    });
  }
  if (snapshot.terrain !== null) {
    fieldChips.push({
      kind: "terrain",
      name: snapshot.terrain,
      turnsRemaining: snapshot.terrain_turns,
    });
  }
  return {
    phase: snapshot.phase,
    turn: snapshot.turn,
    fieldChips,
    weather: snapshot.weather,
    weatherTurns: snapshot.weather_turns,
    terrain: snapshot.terrain,
    terrainTurns: snapshot.terrain_turns,
    sides: snapshot.sides.map(renderSide),
    winner: snapshot.winner,
  };
}

function monFromView(mon: MonViewModel): MonView {
  const out: MonView = {
    species: mon.species,
    hp_fraction: mon.hpFraction,
    status: mon.status,
    fainted: mon.fainted,
    revealed: mon.revealed,
    tera_active: mon.teraActive,
    active_slot: mon.activeSlot,
  };
  if (mon.boosts !== null) out.boosts = { ...mon.boosts };
  if (mon.moves !== null) out.moves = [...mon.moves];
  if (mon.ability !== null) out.ability = mon.ability;
  if (mon.item !== undefined) out.item = mon.item;
  if (mon.teraType !== null) out.tera_type = mon.teraType;
  if (mon.stats !== null) out.stats = { ...mon.stats };
  return out;
}

/** Inverse of renderState; the fixture tests assert exact round trips. */
export function snapshotFromView(view: View): StateMessage {
  return {
    type: "state",
    proto: 1,
    phase: view.phase,
    turn: view.turn,
    weather: view.weather,
    weather_turns: view.weatherTurns,
    terrain: view.terrain,
    terrain_turns: view.terrainTurns,
    sides: view.sides.map((side) => ({
      player: side.player,
      own: side.own,
      team: side.team.map(monFromView),
      chosen: [...side.chosen],
      active: [...side.active],
      tera_used: side.teraUsed,
      conditions: Object.fromEntries(
        side.conditions.map((c) => [c.name, c.turnsRemaining]),
      ),
    })),
    winner: view.winner,
  };
}
