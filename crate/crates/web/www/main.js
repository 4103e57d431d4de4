import init, { jc_point, jc_surface, dephasing_curve } from "./pkg/qslkit_web.js";

const num = (id) => parseFloat(document.getElementById(id).value);
const el = (id) => document.getElementById(id);

function fail(target, e) {
  target.textContent = String(e);
  target.classList.add("err");
}

function runPoint() {
  const out = el("p-out");
  out.classList.remove("err");
  try {
    const v = JSON.parse(jc_point(num("p-lambda"), num("p-gamma0"), num("p-c"), num("p-sz"), num("p-tau")));
    const r = v.result;
    out.textContent = [
      `regime           ${v.regime}`,
      `closed form      ${v.closed_form.toFixed(10)}`,
      `tau_qsl op/hs/tr ${r.tau_qsl_op.toFixed(6)}  ${r.tau_qsl_hs.toFixed(6)}  ${r.tau_qsl_tr.toFixed(6)}`,
      `theta            ${r.theta.toFixed(6)}`,
    ].join("\n");
  } catch (e) {
    fail(out, e);
  }
}

// viridis-ish ramp from five anchors
const RAMP = [[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]];
function color(t) {
  const x = Math.min(Math.max(t, 0), 1) * (RAMP.length - 1);
  const i = Math.min(Math.floor(x), RAMP.length - 2);
  const f = x - i;
  return RAMP[i].map((a, k) => Math.round(a + f * (RAMP[i + 1][k] - a)));
}

let surface = null;

function runSurface() {
  const n = Math.round(num("s-n"));
  try {
    surface = JSON.parse(jc_surface(num("s-lambda"), num("s-sz"), num("s-tau"), num("s-gmax"), n));
  } catch (e) {
    fail(el("s-range"), e);
    return;
  }
  el("s-range").classList.remove("err");
  const vals = surface.tau_qsl.flat().filter((v) => v !== null);
  const lo = Math.min(...vals), hi = Math.max(...vals);
  const canvas = el("s-canvas");
  const ctx = canvas.getContext("2d");
  const cw = canvas.width / n, ch = canvas.height / n;
  surface.tau_qsl.forEach((row, gi) => {
    row.forEach((v, ci) => {
      const [r, g, b] = v === null ? [200, 200, 200] : color(hi > lo ? (v - lo) / (hi - lo) : 0.5);
      ctx.fillStyle = `rgb(${r},${g},${b})`;
      ctx.fillRect(ci * cw, canvas.height - (gi + 1) * ch, Math.ceil(cw), Math.ceil(ch));
    });
  });
  el("s-range").textContent = `τ_QSL from ${lo.toFixed(4)} (dark) to ${hi.toFixed(4)} (bright)`;
}

el("s-canvas").addEventListener("mousemove", (ev) => {
  if (!surface) return;
  const n = surface.coherence.length;
  const rect = ev.target.getBoundingClientRect();
  const ci = Math.min(n - 1, Math.floor(((ev.clientX - rect.left) / rect.width) * n));
  const gi = Math.min(n - 1, Math.floor(((rect.bottom - ev.clientY) / rect.height) * n));
  const v = surface.tau_qsl[gi][ci];
  el("s-hover").textContent =
    `C = ${surface.coherence[ci].toFixed(3)}, γ₀ = ${surface.gamma0[gi].toFixed(2)}: ` +
    (v === null ? "infeasible" : `τ_QSL = ${v.toFixed(5)}`);
});

function runCurve() {
  const canvas = el("d-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  let d;
  try {
    d = JSON.parse(dephasing_curve(num("d-eta"), num("d-c"), num("d-tau"), num("d-smax"), 120));
  } catch (e) {
    ctx.fillStyle = "#b00";
    ctx.fillText(String(e), 10, 20);
    return;
  }
  const pad = 40;
  const smin = d.s[0], smax = d.s[d.s.length - 1];
  const hi = Math.max(...d.tau_qsl, 1e-12);
  const x = (s) => pad + ((s - smin) / (smax - smin)) * (canvas.width - 2 * pad);
  const y = (v) => canvas.height - pad - (v / hi) * (canvas.height - 2 * pad);
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, canvas.height - pad);
  ctx.lineTo(canvas.width - pad, canvas.height - pad);
  ctx.stroke();
  ctx.fillStyle = "#222";
  ctx.fillText(`s = ${smin}`, pad, canvas.height - pad + 15);
  ctx.fillText(`s = ${smax}`, canvas.width - pad - 40, canvas.height - pad + 15);
  ctx.fillText(`τ_QSL max ${hi.toFixed(4)}`, pad + 5, pad - 8);
  ctx.strokeStyle = "#2a6";
  ctx.lineWidth = 2;
  ctx.beginPath();
  d.s.forEach((s, i) => (i ? ctx.lineTo : ctx.moveTo).call(ctx, x(s), y(d.tau_qsl[i])));
  ctx.stroke();
}

await init();
el("p-run").onclick = runPoint;
el("s-run").onclick = runSurface;
el("d-run").onclick = runCurve;
runPoint();
runSurface();
runCurve();
