import { describe, expect, it } from "vitest";

import { ApiError, GatewayClient } from "../src/api.js";
import { EnrollFlow, VerifyFlow, describeDecision } from "../src/flows.js";
import type { EnrollResult, VerifyResult, WireTap } from "../src/types.js";
import { asSample, prng, randomMelody, renderTaps } from "./helpers.js";

function stubClient(overrides: Partial<Record<"enroll" | "verify", unknown>>): GatewayClient {
  const client = Object.create(GatewayClient.prototype) as GatewayClient;
  Object.assign(client, overrides);
  return client;
}

const rand = prng(77);
const melody = randomMelody(rand, 6);
const sampleOf = () => asSample(renderTaps(melody, rand));

describe("EnrollFlow", () => {
  it("collects n samples then submits them in one request", async () => {
    const submitted: WireTap[][][] = [];
    const client = stubClient({
      enroll: async (_user: string, samples: WireTap[][]) => {
        submitted.push(samples);
        return { user_id: "alice", length: 6, threshold: 0 } satisfies EnrollResult;
      },
    });
    const flow = new EnrollFlow(client, "alice", 3);
    await flow.submitSample(sampleOf());
    await flow.submitSample(sampleOf());
    expect(flow.state.phase).toBe("collecting");
    expect(flow.state.collected).toBe(2);
    await flow.submitSample(sampleOf());
    expect(flow.state.phase).toBe("done");
    expect(flow.state.result?.length).toBe(6);
    expect(submitted).toHaveLength(1);
    expect(submitted[0]).toHaveLength(3);
  });

  it("prompts re-entry on a tap-count mismatch without advancing", async () => {
    const client = stubClient({});
    const flow = new EnrollFlow(client, "alice", 3);
    await flow.submitSample(sampleOf());
    const wrong = asSample(renderTaps(randomMelody(rand, 4), rand));
    const state = await flow.submitSample(wrong);
    expect(state.collected).toBe(1);
    expect(state.phase).toBe("collecting");
    expect(state.message).toContain("does not match");
    expect(state.message).toContain("re-enter");
  });

  it("ignores empty captures", async () => {
    const flow = new EnrollFlow(stubClient({}), "alice", 3);
    const state = await flow.submitSample(null);
    expect(state.collected).toBe(0);
    expect(state.message).toContain("nothing captured");
  });

  it("discards malformed payloads with a visible notice", async () => {
    const flow = new EnrollFlow(stubClient({}), "alice", 3);
    const broken = asSample([{ down_ts: 10, up_ts: 5, pressure: 0.5, size: 0.5 }]);
    const state = await flow.submitSample(broken);
    expect(state.collected).toBe(0);
    expect(state.message).toContain("discarded");
  });

  it("surfaces service errors verbatim and supports retry when transient", async () => {
    let calls = 0;
    const client = stubClient({
      enroll: async () => {
        calls += 1;
        if (calls === 1) throw new ApiError("unreachable", "service unreachable: connect refused", 0);
        return { user_id: "alice", length: 6, threshold: 0 } satisfies EnrollResult;
      },
    });
    const flow = new EnrollFlow(client, "alice", 2);
    await flow.submitSample(sampleOf());
    await flow.submitSample(sampleOf());
    expect(flow.state.phase).toBe("failed");
    expect(flow.state.message).toContain("service unreachable");
    expect(flow.state.retryable).toBe(true);
    await flow.retry();
    expect(flow.state.phase).toBe("done");
  });

  it("marks the flow degraded when any sample was degraded", async () => {
    const flow = new EnrollFlow(stubClient({}), "alice", 3);
    const degraded = { ...sampleOf(), degraded: true };
    await flow.submitSample(degraded);
    expect(flow.state.degraded).toBe(true);
  });
});

describe("VerifyFlow", () => {
  it("renders an accepted decision with its margin and records history", async () => {
    const client = stubClient({
      verify: async () =>
        ({ accepted: true, reason: "ok", threshold: 0, score: 0.8 }) satisfies VerifyResult,
    });
    const flow = new VerifyFlow(client, "alice");
    const state = await flow.submit(sampleOf());
    expect(state.phase).toBe("decided");
    expect(state.message).toContain("accepted");
    expect(state.last?.margin).toBeCloseTo(0.8);
    expect(state.history).toHaveLength(1);
    await flow.submit(sampleOf());
    expect(flow.state.history).toHaveLength(2);
  });

  it("renders the length-mismatch reason without a score", async () => {
    const client = stubClient({
      verify: async () =>
        ({ accepted: false, reason: "length_mismatch", threshold: 0 }) satisfies VerifyResult,
    });
    const flow = new VerifyFlow(client, "alice");
    const state = await flow.submit(sampleOf());
    expect(state.message).toContain("length mismatch");
    expect(state.last?.score).toBeNull();
    expect(state.last?.margin).toBeNull();
  });

  it("maps a missing profile to an enroll-first notice", async () => {
    const client = stubClient({
      verify: async () => {
        throw new ApiError("not_found", "no profile stored for 'alice'", 404);
      },
    });
    const flow = new VerifyFlow(client, "alice");
    const state = await flow.submit(sampleOf());
    expect(state.phase).toBe("failed");
    expect(state.message).toContain("enroll first");
  });
});

describe("describeDecision", () => {
  it("never exposes a score for gate rejections", () => {
    const text = describeDecision({
      accepted: false, reason: "length_mismatch", score: null, threshold: 0, margin: null, at: 0,
    });
    expect(text).toContain("length mismatch");
    expect(text).not.toContain("margin");
  });
});
