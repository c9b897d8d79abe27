/**
 * Console state: the GUI-side mirror of the engine session.
 *
 * The button list follows button/undo-button frames exactly, so it always
 * matches what the model currently offers. The session phase is inferred
 * from traffic in both directions: sending a goal marks the session
 * running until the engine answers, the first success of an interaction
 * opens it, and each undo-goal closes one.
 */
import type { Msg } from "./protocol.js";

export interface ButtonEntry {
  readonly id: number;
  readonly text: string;
}

export type SessionPhase = "idle" | "running" | "at-success";

export interface ConsoleState {
  readonly connected: boolean;
  readonly variables: readonly string[];
  readonly buttons: readonly ButtonEntry[];
  readonly goalText: string;
  readonly phase: SessionPhase;
  /** Interactions the engine currently holds open. */
  readonly openGoals: number;
  /** A sent goal has not been answered yet. */
  readonly awaiting: boolean;
  readonly lastError: string | null;
  readonly transcript: readonly string[];
}

export function initialConsole(): ConsoleState {
  return {
    connected: false,
    variables: [],
    buttons: [],
    goalText: "",
    phase: "idle",
    openGoals: 0,
    awaiting: false,
    lastError: null,
    transcript: [],
  };
}

function log(state: ConsoleState, line: string): string[] {
  return [...state.transcript, line];
}

function settle(openGoals: number): SessionPhase {
  return openGoals > 0 ? "at-success" : "idle";
}

/** Fold one engine frame into the console state. */
export function applyEngine(state: ConsoleState, msg: Msg): ConsoleState {
  switch (msg.kind) {
    case "variables":
      return { ...state, connected: true, variables: [...msg.names] };
    case "button":
      return {
        ...state,
        buttons: [...state.buttons, { id: msg.id, text: msg.text }],
      };
    case "undoButton":
      return {
        ...state,
        buttons: state.buttons.filter((b) => b.id !== msg.id),
      };
    case "success": {
      const openGoals = state.awaiting ? state.openGoals + 1
                                       : state.openGoals;
      return {
        ...state, openGoals, awaiting: false, phase: "at-success",
        transcript: log(state, "success"),
      };
    }
    case "error":
      return {
        ...state,
        awaiting: false,
        phase: settle(state.openGoals),
        lastError: msg.text,
        transcript: log(state, `error: ${msg.text}`),
      };
    case "undoGoal": {
      const openGoals = Math.max(0, state.openGoals - 1);
      return {
        ...state, openGoals,
        phase: state.awaiting ? state.phase : settle(openGoals),
        transcript: log(state, `undone: ${msg.goal}`),
      };
    }
    case "clear":
      return {
        ...state,
        openGoals: 0,
        awaiting: false,
        phase: "idle",
        transcript: log(state, "cleared"),
      };
    default:
      return state;
  }
}

/** Record a frame this GUI just sent to the engine. */
export function noteSent(state: ConsoleState, msg: Msg): ConsoleState {
  switch (msg.kind) {
    case "execute":
      return {
        ...state,
        awaiting: true,
        phase: "running",
        goalText: msg.goal,
        lastError: null,
        transcript: log(state, `?- ${msg.goal}`),
      };
    case "backtrack":
    case "backtrackInteraction":
      return { ...state, phase: "running", lastError: null };
    default:
      return state;
  }
}

export function disconnected(state: ConsoleState): ConsoleState {
  return {
    ...state,
    connected: false,
    awaiting: false,
    openGoals: 0,
    phase: "idle",
    transcript: log(state, "connection closed"),
  };
}
