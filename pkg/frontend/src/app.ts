// DOM wiring: WebSocket lifecycle with backoff, canvas painting from
// tick events plus on-demand top-down images, the plant panel, and the
// audit log. All decision logic lives in controller.ts.

import { ConsoleController } from "./controller.js";
import { DEFAULT_PX_PER_M, imageToRGBA } from "./mapview.js";
import { parseMessage, buildRequest, compassCommand } from "./protocol.js";
import {
  controlRange,
  formatValue,
  isWritable,
  selectVariables,
  TrendWindow,
} from "./plantpanel.js";
import type { GatewayResponse, ImagePayload } from "./types.js";

const RECONNECT_MIN_MS = 500;
const RECONNECT_MAX_MS = 5000;
const TOPDOWN_REFRESH_MS = 1000;
const COMPASS_REFRESH_MS = 500;

export class App {
  private socket: WebSocket | null = null;
  private nextId = 1;
  private reconnectMs = RECONNECT_MIN_MS;
  private controller = new ConsoleController((cmd) => this.sendCommand(cmd));
  private pending = new Map<number, (resp: GatewayResponse) => void>();
  private lastTopdown: ImagePayload | null = null;
  private trendWindows = new Map<string, TrendWindow>();
  private filter = "";

  private canvas = document.getElementById("map") as HTMLCanvasElement;
  private statusEl = document.getElementById("status")!;
  private hintEl = document.getElementById("hint")!;
  private compassEl = document.getElementById("compass")!;
  private panelEl = document.getElementById("plant-panel")!;
  private logEl = document.getElementById("command-log")!;
  private filterEl = document.getElementById("filter") as HTMLInputElement;
  private thermalBtn = document.getElementById("thermal-toggle") as HTMLButtonElement;

  start(): void {
    this.connect();
    this.bindInputs();
    window.setInterval(() => this.refreshTopdown(), TOPDOWN_REFRESH_MS);
    window.setInterval(() => this.refreshCompass(), COMPASS_REFRESH_MS);
    const paint = () => {
      this.paint();
      window.requestAnimationFrame(paint);
    };
    window.requestAnimationFrame(paint);
  }

  // -- socket -----------------------------------------------------------

  private connect(): void {
    const url = `ws://${window.location.host}/ws`;
    this.controller.onSocket("connecting");
    const socket = new WebSocket(url);
    this.socket = socket;
    socket.onopen = () => {
      this.reconnectMs = RECONNECT_MIN_MS;
      this.controller.onSocket("connected");
      socket.send(buildRequest(this.nextId++, "subscribe"));
      this.refreshTopdown();
    };
    socket.onmessage = (msg: MessageEvent) => this.onMessage(String(msg.data));
    socket.onclose = () => {
      this.controller.onSocket("disconnected");
      this.socket = null;
      window.setTimeout(() => this.connect(), this.reconnectMs);
      this.reconnectMs = Math.min(this.reconnectMs * 2, RECONNECT_MAX_MS);
    };
    socket.onerror = () => socket.close();
  }

  private sendCommand(cmd: string): number | null {
    if (this.socket === null || this.socket.readyState !== WebSocket.OPEN) {
      return null;
    }
    const id = this.nextId++;
    this.socket.send(buildRequest(id, cmd));
    return id;
  }

  private request(cmd: string, onReply: (resp: GatewayResponse) => void): void {
    const id = this.sendCommand(cmd);
    if (id !== null) {
      this.pending.set(id, onReply);
    }
  }

  private onMessage(text: string): void {
    const parsed = parseMessage(text);
    if (parsed.kind === "tick") {
      this.controller.onTick(parsed.event);
      this.updateTrends();
      this.renderPanel();
      return;
    }
    if (parsed.kind === "response") {
      const id = parsed.response.id;
      if (typeof id === "number" && this.pending.has(id)) {
        const handler = this.pending.get(id)!;
        this.pending.delete(id);
        handler(parsed.response);
      }
    }
  }

  // -- inputs -----------------------------------------------------------

  private bindInputs(): void {
    window.addEventListener("keydown", (ev: KeyboardEvent) => {
      if (ev.target instanceof HTMLInputElement) return;
      this.controller.onKey(ev.key);
      this.renderChrome();
      if (
        ["ArrowUp", "ArrowDown", "ArrowLeft", "ArrowRight", "PageUp", "PageDown"].includes(ev.key)
      ) {
        ev.preventDefault();
      }
    });
    this.canvas.addEventListener("click", (ev: MouseEvent) => {
      const rect = this.canvas.getBoundingClientRect();
      const xM = (ev.clientX - rect.left) / DEFAULT_PX_PER_M;
      const yM = (ev.clientY - rect.top) / DEFAULT_PX_PER_M;
      this.controller.clickMap(xM, yM);
      this.renderChrome();
    });
    this.thermalBtn.addEventListener("click", () => {
      this.controller.toggleThermal();
      this.thermalBtn.textContent = `view: ${this.controller.state.viewMode}`;
      this.refreshTopdown();
    });
    this.filterEl.addEventListener("input", () => {
      this.filter = this.filterEl.value;
      this.renderPanel();
    });
  }

  // -- periodic fetches ----------------------------------------------------

  private refreshTopdown(): void {
    if (this.controller.state.socket !== "connected") return;
    const id = this.controller.requestTopdown();
    if (id !== null) {
      this.pending.set(id, (resp) => {
        if (resp.status === "ok" && resp.image !== undefined) {
          this.lastTopdown = resp.image;
        }
      });
    }
  }

  private refreshCompass(): void {
    const possessed = this.controller.state.possessed;
    if (possessed === null || this.controller.state.socket !== "connected") {
      this.compassEl.textContent = "";
      return;
    }
    this.request(compassCommand(possessed), (resp) => {
      if (resp.status === "ok") {
        this.compassEl.textContent = `target bearing ${Number(resp.body).toFixed(1)} deg`;
      }
    });
  }

  private updateTrends(): void {
    const tick = this.controller.state.lastTick;
    if (tick === null) return;
    for (const name of ["sg1_level_m", "sg2_level_m"]) {
      const value = tick.plant[name];
      if (value === undefined) continue;
      let window = this.trendWindows.get(name);
      if (window === undefined) {
        window = new TrendWindow();
        this.trendWindows.set(name, window);
      }
      window.push(tick.t_ms, value);
    }
  }

  // -- rendering ------------------------------------------------------------

  private paint(): void {
    const ctx = this.canvas.getContext("2d");
    if (ctx === null) return;
    ctx.fillStyle = "#10141c";
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    if (this.lastTopdown !== null) {
      const rgba = imageToRGBA(this.lastTopdown);
      const image = new ImageData(rgba, this.lastTopdown.w, this.lastTopdown.h);
      // Top-down images arrive at 4 px/cell; canvas draws at 8 px/m.
      createImageBitmap(image).then((bitmap) => {
        ctx.imageSmoothingEnabled = false;
        ctx.drawImage(bitmap, 0, 0, this.canvas.width, this.canvas.height);
        this.paintMarkers(ctx);
      });
    } else {
      this.paintMarkers(ctx);
    }
    this.renderChrome();
  }

  private paintMarkers(ctx: CanvasRenderingContext2D): void {
    for (const marker of this.controller.markers(DEFAULT_PX_PER_M)) {
      ctx.fillStyle = marker.color;
      ctx.fillRect(marker.cx - 3, marker.cy - 3, 6, 6);
      ctx.strokeStyle = "#ffffff";
      ctx.beginPath();
      ctx.moveTo(marker.cx, marker.cy);
      ctx.lineTo(marker.tickX, marker.tickY);
      ctx.stroke();
      if (marker.id === this.controller.state.possessed) {
        ctx.strokeStyle = marker.color;
        ctx.strokeRect(marker.cx - 6, marker.cy - 6, 12, 12);
      }
    }
  }

  private renderChrome(): void {
    const state = this.controller.state;
    const stale = this.controller.stale();
    this.statusEl.textContent =
      `${state.socket}` +
      (state.lastTick !== null ? ` | t=${state.lastTick.t_ms} ms` : "") +
      (state.possessed !== null ? ` | possessing ${state.possessed}` : "") +
      (stale ? " | STALE" : "");
    this.statusEl.className = stale ? "stale" : "live";
    this.hintEl.textContent = this.controller.hint ?? "";
    const rows = state.commandLog.slice(-12).reverse();
    this.logEl.textContent = rows.map((r) => `${r.gesture} -> ${r.cmd}`).join("\n");
  }

  private renderPanel(): void {
    const tick = this.controller.state.lastTick;
    if (tick === null) return;
    const names = selectVariables(tick.plant, this.filter);
    const rows: string[] = [];
    for (const name of names) {
      const value = tick.plant[name];
      const pretty = formatValue(value);
      if (isWritable(name)) {
        const [lo, hi] = controlRange(name);
        rows.push(
          `<tr><td>${name}</td><td class="num">${pretty}</td>` +
            `<td><input type="range" min="${lo}" max="${hi}" step="0.01" ` +
            `value="${value}" data-var="${name}"></td></tr>`,
        );
      } else {
        let trend = "";
        const window = this.trendWindows.get(name);
        if (window !== undefined) {
          const sign = window.sign();
          trend = sign > 0 ? " &#9650;" : sign < 0 ? " &#9660;" : "";
        }
        rows.push(
          `<tr><td>${name}</td><td class="num">${pretty}${trend}</td><td></td></tr>`,
        );
      }
    }
    this.panelEl.innerHTML = `<table>${rows.join("")}</table>`;
    for (const slider of this.panelEl.querySelectorAll("input[type=range]")) {
      slider.addEventListener("change", (ev: Event) => {
        const el = ev.target as HTMLInputElement;
        this.controller.onSlider(el.dataset["var"]!, Number(el.value));
        this.renderChrome();
      });
    }
  }
}
