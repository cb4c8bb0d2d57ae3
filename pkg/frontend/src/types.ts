/** Wire types matching the gateway's JSON schemas exactly. */

export interface WireTap {
  down_ts: number;
  up_ts: number;
  pressure: number;
  size: number;
}

export interface EnrollResult {
  user_id: string;
  length: number;
  threshold: number;
}

export interface VerifyResult {
  accepted: boolean;
  reason: "ok" | "length_mismatch" | "invalid_input";
  threshold: number;
  score?: number;
}

/** One captured melody plus capture-quality metadata (not sent on the wire). */
export interface ClientTapSample {
  taps: WireTap[];
  /** true when pressure or contact size had to be substituted */
  degraded: boolean;
  /** human-readable capture notes (dropped events, ignored touches) */
  notices: string[];
}
