/**
 * Browser shell: console panel on the left, one active view on the
 * right, live connection or trace replay feeding the same folds.
 */
import type { Msg } from "./protocol.js";
import type { EngineClient, SnapshotMode } from "./client.js";
import { connectWebSocket } from "./client.js";
import { disconnected, noteSent } from "./console.js";
import { withPolicy } from "./fdviewer.js";
import type { Camera } from "./projection.js";
import { SIDE_VIEW, clampCamera } from "./projection.js";
import {
  renderFd, renderFixedWidth, renderLeafSpacing, renderTreemap, render3d,
  xmlEscape,
} from "./render.js";
import type { Workspace } from "./replay.js";
import { applyOrFreeze, emptyWorkspace, parseTrace, seek } from "./replay.js";

type ViewName = "fixed" | "leaf" | "3d" | "treemap" | "fd";

const VIEW_LABELS: Record<ViewName, string> = {
  fixed: "Tree (fixed width)",
  leaf: "Tree (leaf spacing)",
  "3d": "Tree (3D)",
  treemap: "Treemap",
  fd: "Domains",
};

let ws: Workspace = emptyWorkspace();
let camera: Camera = SIDE_VIEW;
let view: ViewName = "fixed";
let client: EngineClient | null = null;
let replayMsgs: Msg[] | null = null;
let frozen: string | null = null;
let showLabels = false;
const flatZoom: Record<ViewName, number> = {
  fixed: 1, leaf: 1, "3d": 1, treemap: 1, fd: 1,
};

const el = <T extends HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

function onEngineMsg(msg: Msg): void {
  if (frozen !== null) return;
  const outcome = applyOrFreeze(ws, msg);
  ws = outcome.ws;
  if (outcome.frozen !== null) {
    frozen = outcome.frozen;
    setStatus(`stream corrupted: ${frozen}; viewers frozen`);
  }
  renderAll();
}

function connect(): void {
  const host = (el<HTMLInputElement>("host").value || "127.0.0.1").trim();
  const port = parseInt(el<HTMLInputElement>("port").value, 10) || 8761;
  client?.close();
  replayMsgs = null;
  frozen = null;
  ws = emptyWorkspace(ws.fd.policy);
  client = connectWebSocket(`ws://${host}:${port}/`, {
    onMsg: onEngineMsg,
    onSent: (msg) => {
      ws = { ...ws, console: noteSent(ws.console, msg) };
      renderAll();
    },
    onClose: () => {
      ws = { ...ws, console: disconnected(ws.console) };
      client = null;
      renderAll();
    },
    onError: (err) => setStatus(err.message),
  });
  setStatus(`connecting to ${host}:${port}`);
}

function loadReplay(file: File): void {
  client?.close();
  client = null;
  frozen = null;
  file.text().then((text) => {
    try {
      replayMsgs = parseTrace(text);
    } catch (e) {
      setStatus((e as Error).message);
      return;
    }
    const slider = el<HTMLInputElement>("scrub");
    slider.max = String(replayMsgs.length);
    slider.value = slider.max;
    ws = seek(replayMsgs, replayMsgs.length, ws.fd.policy);
    setStatus(`replaying ${file.name}: ${replayMsgs.length} frames`);
    renderAll();
  });
}

function scrubTo(upto: number): void {
  if (!replayMsgs) return;
  ws = seek(replayMsgs, upto, ws.fd.policy);
  renderAll();
}

function setStatus(text: string): void {
  el("status").textContent = text;
}

function renderView(): string {
  const opts = { labels: showLabels };
  switch (view) {
    case "fixed": return renderFixedWidth(ws.tree, undefined, undefined, opts);
    case "leaf": return renderLeafSpacing(ws.tree, undefined, undefined, opts);
    case "3d": return render3d(ws.tree, camera);
    case "treemap": return renderTreemap(ws.tree);
    case "fd": return renderFd(ws.fd);
  }
}

function renderConsole(): void {
  const c = ws.console;
  el("phase").textContent = c.connected || replayMsgs
    ? `${c.phase} (${c.openGoals} open)` : "disconnected";
  const list = el("buttons");
  list.replaceChildren();
  for (const b of c.buttons) {
    const btn = document.createElement("button");
    btn.textContent = b.text;
    btn.disabled = client === null;
    btn.addEventListener("click", () => client?.execute(b.text));
    list.appendChild(btn);
  }
  const log = el("transcript");
  log.textContent = c.transcript.slice(-200).join("\n");
  log.scrollTop = log.scrollHeight;
}

function renderAll(): void {
  renderConsole();
  const banner = frozen === null ? ""
    : `<div class="banner">stream corrupted: ${xmlEscape(frozen)}</div>`;
  const scale = flatZoom[view];
  el("view").innerHTML = banner +
    `<div style="transform: scale(${scale}); transform-origin: 0 0">` +
    renderView() + "</div>";
}

function wireControls(): void {
  el("connect").addEventListener("click", connect);
  el<HTMLInputElement>("trace-file").addEventListener("change", (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (file) loadReplay(file);
  });
  el<HTMLInputElement>("scrub").addEventListener("input", (ev) =>
    scrubTo(parseInt((ev.target as HTMLInputElement).value, 10) || 0));

  el<HTMLInputElement>("goal").addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") {
      const goal = (ev.target as HTMLInputElement).value.trim();
      if (goal) client?.execute(goal);
    }
  });
  el("backtrack").addEventListener("click", () => client?.backtrack());
  el("backtrack-interaction").addEventListener(
    "click", () => client?.backtrackInteraction());
  el("clear").addEventListener("click", () => client?.clear());

  for (const mode of ["size", "interval", "values"] as SnapshotMode[]) {
    el(`snap-${mode}`).addEventListener(
      "change", () => client?.show(mode));
  }
  el<HTMLInputElement>("policy").addEventListener("change", (ev) => {
    const erase = (ev.target as HTMLInputElement).checked;
    ws = { ...ws, fd: withPolicy(ws.fd, erase ? "erase" : "trace") };
    renderAll();
  });

  const tabs = el("tabs");
  for (const name of Object.keys(VIEW_LABELS) as ViewName[]) {
    const tab = document.createElement("button");
    tab.textContent = VIEW_LABELS[name];
    tab.addEventListener("click", () => {
      view = name;
      renderAll();
    });
    tabs.appendChild(tab);
  }

  const pane = el("view");
  let dragging = false;
  let lastX = 0;
  let lastY = 0;
  pane.addEventListener("mousedown", (ev) => {
    dragging = true;
    lastX = ev.clientX;
    lastY = ev.clientY;
  });
  window.addEventListener("mouseup", () => { dragging = false; });
  window.addEventListener("mousemove", (ev) => {
    if (!dragging || view !== "3d") return;
    camera = clampCamera({
      ...camera,
      yaw: camera.yaw + (ev.clientX - lastX) * 0.01,
      pitch: camera.pitch + (ev.clientY - lastY) * 0.01,
    });
    lastX = ev.clientX;
    lastY = ev.clientY;
    renderAll();
  });
  pane.addEventListener("wheel", (ev) => {
    if (!ev.ctrlKey && view !== "3d") return;
    ev.preventDefault();
    const factor = ev.deltaY < 0 ? 1.1 : 1 / 1.1;
    if (view === "3d") {
      camera = clampCamera({ ...camera, zoom: camera.zoom * factor });
    } else {
      flatZoom[view] = Math.min(8, Math.max(0.1, flatZoom[view] * factor));
    }
    renderAll();
  });

  el<HTMLInputElement>("labels").addEventListener("change", (ev) => {
    showLabels = (ev.target as HTMLInputElement).checked;
    renderAll();
  });
}

wireControls();
renderAll();
setStatus("connect to an engine or load a trace");
