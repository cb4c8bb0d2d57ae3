import type { ClientTapSample, WireTap } from "./types.js";

/**
 * The slice of a PointerEvent the recorder consumes; tests synthesize
 * these directly.
 */
export interface PointerSample {
  kind: "down" | "up";
  pointerId: number;
  /** high-resolution timestamp in milliseconds */
  timeStamp: number;
  /** 0..1 where supported; mice report a constant while pressed */
  pressure?: number;
  pointerType?: string; // "mouse" | "touch" | "pen"
  /** contact geometry in CSS px; browsers report 1x1 when unsupported */
  width?: number;
  height?: number;
}

/** Contact side length (CSS px) that maps to size 1.0. */
const FULL_CONTACT_PX = 60;
const FALLBACK_CHANNEL = 0.5;

function clamp01(x: number): number {
  return Math.min(1, Math.max(0, x));
}

/**
 * Collects down/up pointer pairs into a wire-ready tap sample.
 *
 * Policy:
 *  - single touch: while one pointer is down, other pointers are ignored;
 *  - timestamps must strictly increase through the payload; any event
 *    that would break that is dropped (the tap never forms);
 *  - mice and geometry-less devices get pressure/size 0.5 and mark the
 *    sample as degraded.
 */
export class TapRecorder {
  private taps: WireTap[] = [];
  private active: { pointerId: number; downTs: number; pressure: number; size: number } | null =
    null;
  private degraded = false;
  private notices: string[] = [];

  get count(): number {
    return this.taps.length;
  }

  get isPressed(): boolean {
    return this.active !== null;
  }

  handle(ev: PointerSample): void {
    if (ev.kind === "down") {
      this.handleDown(ev);
    } else {
      this.handleUp(ev);
    }
  }

  private lastTs(): number {
    const last = this.taps[this.taps.length - 1];
    return last ? last.up_ts : -Infinity;
  }

  private handleDown(ev: PointerSample): void {
    if (this.active !== null) {
      this.notices.push("overlapping touch ignored");
      return;
    }
    if (!Number.isFinite(ev.timeStamp) || ev.timeStamp <= this.lastTs()) {
      this.notices.push("out-of-order touch dropped");
      return;
    }
    this.active = {
      pointerId: ev.pointerId,
      downTs: ev.timeStamp,
      pressure: this.readPressure(ev),
      size: this.readSize(ev),
    };
  }

  private handleUp(ev: PointerSample): void {
    if (this.active === null || ev.pointerId !== this.active.pointerId) {
      return; // release of an ignored or unknown pointer
    }
    const { downTs, pressure, size } = this.active;
    this.active = null;
    if (!Number.isFinite(ev.timeStamp) || ev.timeStamp <= downTs) {
      this.notices.push("out-of-order touch dropped");
      return;
    }
    this.taps.push({ down_ts: downTs, up_ts: ev.timeStamp, pressure, size });
  }

  private readPressure(ev: PointerSample): number {
    const supported =
      ev.pointerType !== "mouse" &&
      typeof ev.pressure === "number" &&
      ev.pressure > 0 &&
      ev.pressure <= 1;
    if (!supported) {
      this.degraded = true;
      return FALLBACK_CHANNEL;
    }
    return clamp01(ev.pressure as number);
  }

  private readSize(ev: PointerSample): number {
    const w = ev.width ?? 0;
    const h = ev.height ?? 0;
    if (!(w > 1 && h > 1)) {
      this.degraded = true;
      return FALLBACK_CHANNEL;
    }
    return clamp01(Math.sqrt(w * h) / FULL_CONTACT_PX);
  }

  /**
   * Ends the entry (the Done control). A pointer still down is discarded
   * with a notice; returns null when nothing was captured.
   */
  finish(): ClientTapSample | null {
    if (this.active !== null) {
      this.notices.push("unfinished touch discarded");
      this.active = null;
    }
    if (this.taps.length === 0) {
      this.reset();
      return null;
    }
    const sample: ClientTapSample = {
      taps: this.taps,
      degraded: this.degraded,
      notices: this.notices,
    };
    this.taps = [];
    this.reset();
    return sample;
  }

  reset(): void {
    this.taps = [];
    this.active = null;
    this.degraded = false;
    this.notices = [];
  }
}

/** Wire-schema check used by tests and as a last-line guard before send. */
export function isValidPayload(taps: WireTap[]): boolean {
  if (!Array.isArray(taps) || taps.length === 0) return false;
  let previous = -Infinity;
  for (const tap of taps) {
    const keys = Object.keys(tap).sort();
    if (keys.join(",") !== "down_ts,pressure,size,up_ts") return false;
    const { down_ts, up_ts, pressure, size } = tap;
    if (![down_ts, up_ts, pressure, size].every(Number.isFinite)) return false;
    if (!(down_ts > previous && up_ts > down_ts)) return false;
    if (pressure < 0 || pressure > 1 || size < 0 || size > 1) return false;
    previous = up_ts;
  }
  return true;
}
