import { GatewayClient } from "./api.js";
import { TapRecorder, type PointerSample } from "./capture.js";
import { EnrollFlow, VerifyFlow, type DecisionRecord } from "./flows.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const pad = $("pad");
const doneButton = $<HTMLButtonElement>("done");
const resetButton = $<HTMLButtonElement>("reset");
const statusLine = $("status");
const tapCount = $("tap-count");
const degradedBadge = $("degraded");
const gauge = $("gauge-fill");
const gaugeWrap = $("gauge");
const historyList = $<HTMLUListElement>("history");
const userInput = $<HTMLInputElement>("user-id");
const serviceInput = $<HTMLInputElement>("service-url");
const modeEnroll = $<HTMLInputElement>("mode-enroll");
const samplesInput = $<HTMLInputElement>("samples-n");

const recorder = new TapRecorder();
let enrollFlow: EnrollFlow | null = null;
let verifyFlow: VerifyFlow | null = null;

function client(): GatewayClient {
  return new GatewayClient(serviceInput.value.replace(/\/$/, ""));
}

function setStatus(text: string, tone: "info" | "good" | "bad" = "info"): void {
  statusLine.textContent = text;
  statusLine.dataset.tone = tone;
}

function refreshCount(): void {
  tapCount.textContent = String(recorder.count);
  pad.classList.toggle("pressed", recorder.isPressed);
}

function toSample(ev: PointerEvent, kind: "down" | "up"): PointerSample {
  return {
    kind,
    pointerId: ev.pointerId,
    timeStamp: ev.timeStamp,
    pressure: ev.pressure,
    pointerType: ev.pointerType,
    width: ev.width,
    height: ev.height,
  };
}

pad.addEventListener("pointerdown", (ev) => {
  pad.setPointerCapture(ev.pointerId);
  recorder.handle(toSample(ev, "down"));
  refreshCount();
  ev.preventDefault();
});
pad.addEventListener("pointerup", (ev) => {
  recorder.handle(toSample(ev, "up"));
  refreshCount();
  ev.preventDefault();
});
pad.addEventListener("pointercancel", (ev) => {
  recorder.handle(toSample(ev, "up"));
  refreshCount();
});

function renderGauge(record: DecisionRecord | null): void {
  if (!record || record.score === null) {
    gaugeWrap.classList.add("empty");
    gauge.style.width = "0%";
    return;
  }
  gaugeWrap.classList.remove("empty");
  // center is the threshold; +/-2 score units span the bar
  const relative = (record.score - record.threshold) / 2;
  const pct = Math.max(2, Math.min(98, 50 + 50 * relative));
  gauge.style.width = `${pct}%`;
  gauge.dataset.tone = record.accepted ? "good" : "bad";
}

function renderHistory(history: DecisionRecord[]): void {
  historyList.replaceChildren(
    ...history
      .slice()
      .reverse()
      .map((record) => {
        const item = document.createElement("li");
        const verdict = record.accepted ? "accepted" : `rejected (${record.reason})`;
        const score = record.score === null ? "" : ` score ${record.score.toPrecision(3)}`;
        item.textContent = `${new Date(record.at).toLocaleTimeString()} — ${verdict}${score}`;
        item.className = record.accepted ? "good" : "bad";
        return item;
      }),
  );
}

function startFlows(): void {
  const userId = userInput.value.trim();
  enrollFlow = null;
  verifyFlow = null;
  if (!userId) {
    setStatus("enter a user id to begin");
    return;
  }
  if (modeEnroll.checked) {
    enrollFlow = new EnrollFlow(client(), userId, Number(samplesInput.value) || 5, (state) => {
      setStatus(state.message, state.phase === "done" ? "good" : state.phase === "failed" ? "bad" : "info");
      degradedBadge.hidden = !state.degraded;
    });
    setStatus(enrollFlow.state.message);
  } else {
    verifyFlow = new VerifyFlow(client(), userId, (state) => {
      const tone = state.phase === "failed" ? "bad" : state.last?.accepted ? "good" : state.last ? "bad" : "info";
      setStatus(state.message, tone);
      renderGauge(state.last);
      renderHistory(state.history);
    });
    setStatus(verifyFlow.state.message);
  }
}

doneButton.addEventListener("click", async () => {
  const sample = recorder.finish();
  refreshCount();
  if (sample?.degraded) degradedBadge.hidden = false;
  if (sample?.notices.length) setStatus(sample.notices.join("; "));
  if (enrollFlow) await enrollFlow.submitSample(sample);
  else if (verifyFlow) await verifyFlow.submit(sample);
  else setStatus("enter a user id to begin");
});

resetButton.addEventListener("click", () => {
  recorder.reset();
  refreshCount();
  startFlows();
});

userInput.addEventListener("change", startFlows);
serviceInput.addEventListener("change", startFlows);
modeEnroll.addEventListener("change", startFlows);
$<HTMLInputElement>("mode-verify").addEventListener("change", startFlows);
samplesInput.addEventListener("change", startFlows);

startFlows();
