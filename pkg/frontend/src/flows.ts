import { ApiError, GatewayClient } from "./api.js";
import { isValidPayload } from "./capture.js";
import type { ClientTapSample, EnrollResult, VerifyResult, WireTap } from "./types.js";

export type EnrollPhase = "collecting" | "submitting" | "done" | "failed";

export interface EnrollState {
  phase: EnrollPhase;
  collected: number;
  required: number;
  expectedLength: number | null;
  message: string;
  degraded: boolean;
  result: EnrollResult | null;
  retryable: boolean;
}

export interface DecisionRecord {
  accepted: boolean;
  reason: VerifyResult["reason"];
  score: number | null;
  threshold: number;
  margin: number | null;
  at: number; // Date.now()
}

export interface VerifyState {
  phase: "idle" | "checking" | "decided" | "failed";
  message: string;
  last: DecisionRecord | null;
  history: DecisionRecord[];
  retryable: boolean;
}

type Listener<S> = (state: S) => void;

/**
 * Collects n same-length samples, prompting re-entry on a tap-count
 * mismatch (the count does not advance), then submits them in one
 * enrollment request. Service errors are surfaced verbatim.
 */
export class EnrollFlow {
  private samples: WireTap[][] = [];
  private stateValue: EnrollState;

  constructor(
    private readonly client: GatewayClient,
    private readonly userId: string,
    private readonly required = 5,
    private readonly onChange: Listener<EnrollState> = () => {},
  ) {
    this.stateValue = {
      phase: "collecting",
      collected: 0,
      required,
      expectedLength: null,
      message: `tap your melody (sample 1 of ${required}), then press Done`,
      degraded: false,
      result: null,
      retryable: false,
    };
  }

  get state(): EnrollState {
    return this.stateValue;
  }

  private update(patch: Partial<EnrollState>): EnrollState {
    this.stateValue = { ...this.stateValue, ...patch };
    this.onChange(this.stateValue);
    return this.stateValue;
  }

  async submitSample(sample: ClientTapSample | null): Promise<EnrollState> {
    if (this.stateValue.phase !== "collecting") return this.stateValue;
    if (sample === null || sample.taps.length === 0) {
      return this.update({ message: "nothing captured — tap the pad, then press Done" });
    }
    if (!isValidPayload(sample.taps)) {
      return this.update({ message: "capture discarded (malformed events) — please re-enter" });
    }
    const expected = this.stateValue.expectedLength;
    if (expected !== null && sample.taps.length !== expected) {
      return this.update({
        message:
          `tap count ${sample.taps.length} does not match your first sample (${expected}) ` +
          `— please re-enter sample ${this.samples.length + 1} of ${this.required}`,
      });
    }

    this.samples.push(sample.taps);
    const collected = this.samples.length;
    this.update({
      collected,
      expectedLength: expected ?? sample.taps.length,
      degraded: this.stateValue.degraded || sample.degraded,
      message:
        collected < this.required
          ? `sample ${collected} of ${this.required} recorded — tap it again`
          : "all samples recorded — training",
    });
    if (collected < this.required) return this.stateValue;
    return this.submitAll();
  }

  private async submitAll(): Promise<EnrollState> {
    this.update({ phase: "submitting" });
    try {
      const result = await this.client.enroll(this.userId, this.samples);
      return this.update({
        phase: "done",
        result,
        message: `enrolled ${result.user_id}: length ${result.length}, threshold ${result.threshold.toPrecision(3)}`,
      });
    } catch (err) {
      const apiErr = err instanceof ApiError ? err : new ApiError("error", String(err), 0);
      return this.update({
        phase: "failed",
        message: apiErr.message,
        retryable: apiErr.status === 0 || apiErr.status >= 500,
      });
    }
  }

  /** Retry the submission after a service failure; samples are kept. */
  async retry(): Promise<EnrollState> {
    if (this.stateValue.phase !== "failed") return this.stateValue;
    return this.submitAll();
  }
}

/** Submits captures for verification and keeps a session history. */
export class VerifyFlow {
  private stateValue: VerifyState = {
    phase: "idle",
    message: "tap your melody, then press Done",
    last: null,
    history: [],
    retryable: false,
  };

  constructor(
    private readonly client: GatewayClient,
    private readonly userId: string,
    private readonly onChange: Listener<VerifyState> = () => {},
  ) {}

  get state(): VerifyState {
    return this.stateValue;
  }

  private update(patch: Partial<VerifyState>): VerifyState {
    this.stateValue = { ...this.stateValue, ...patch };
    this.onChange(this.stateValue);
    return this.stateValue;
  }

  async submit(sample: ClientTapSample | null): Promise<VerifyState> {
    if (sample === null || sample.taps.length === 0) {
      return this.update({ message: "nothing captured — tap the pad, then press Done" });
    }
    if (!isValidPayload(sample.taps)) {
      return this.update({ message: "capture discarded (malformed events) — please re-enter" });
    }
    this.update({ phase: "checking", message: "checking..." });
    try {
      const result = await this.client.verify(this.userId, sample.taps);
      const record: DecisionRecord = {
        accepted: result.accepted,
        reason: result.reason,
        score: result.score ?? null,
        threshold: result.threshold,
        margin: result.score === undefined ? null : result.score - result.threshold,
        at: Date.now(),
      };
      return this.update({
        phase: "decided",
        last: record,
        history: [...this.stateValue.history, record],
        message: describeDecision(record),
        retryable: false,
      });
    } catch (err) {
      const apiErr = err instanceof ApiError ? err : new ApiError("error", String(err), 0);
      return this.update({
        phase: "failed",
        message: apiErr.code === "not_found" ? `no profile for this user — enroll first` : apiErr.message,
        retryable: apiErr.status === 0 || apiErr.status >= 500,
      });
    }
  }
}

export function describeDecision(record: DecisionRecord): string {
  if (record.reason === "length_mismatch") {
    return "rejected: length mismatch (wrong tap count)";
  }
  if (record.reason === "invalid_input") {
    return "rejected: invalid input";
  }
  const margin = record.margin === null ? "" : ` (margin ${record.margin.toPrecision(3)})`;
  return record.accepted ? `accepted${margin}` : `rejected${margin}`;
}
