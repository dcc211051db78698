import init, {
  analyze,
  m1_stages,
  fluid_curve_samples,
  poisson_criterion_curve,
  explore_demo,
} from "./pkg/degreedy_wasm.js";

const $ = (id) => document.getElementById(id);
const fmt = (x, d = 4) => (x === null || x === undefined ? "—" : Number(x).toFixed(d));

function currentSpec() {
  const kind = $("kind").value;
  if (kind === "poisson") return { kind, lambda: Number($("lambda").value) };
  if (kind === "powerlaw") return { kind, alpha: Number($("alpha").value) };
  const mass = $("mass").value.split(",").map((s) => Number(s.trim())).filter((x) => !Number.isNaN(x));
  return { kind: "explicit", mass };
}

// --- tiny canvas plotting -------------------------------------------------

function plot(canvas, series, opts = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  const padL = 46, padR = 12, padT = 12, padB = 26;
  ctx.clearRect(0, 0, W, H);

  let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
  for (const s of series) {
    for (let i = 0; i < s.x.length; i++) {
      if (s.x[i] < xMin) xMin = s.x[i];
      if (s.x[i] > xMax) xMax = s.x[i];
      if (s.y[i] < yMin) yMin = s.y[i];
      if (s.y[i] > yMax) yMax = s.y[i];
    }
  }
  if (!Number.isFinite(xMin) || xMax === xMin) { xMin = 0; xMax = 1; }
  if (!Number.isFinite(yMin) || yMax === yMin) { yMin = 0; yMax = 1; }
  if (opts.yZero) yMin = Math.min(yMin, 0);
  const pad = (yMax - yMin) * 0.06;
  yMin -= pad; yMax += pad;

  const X = (x) => padL + ((x - xMin) / (xMax - xMin)) * (W - padL - padR);
  const Y = (y) => H - padB - ((y - yMin) / (yMax - yMin)) * (H - padT - padB);

  ctx.strokeStyle = "#2a333d";
  ctx.fillStyle = "#8b98a5";
  ctx.font = "11px system-ui";
  ctx.lineWidth = 1;
  const ticks = 5;
  for (let i = 0; i <= ticks; i++) {
    const yv = yMin + ((yMax - yMin) * i) / ticks;
    ctx.beginPath(); ctx.moveTo(padL, Y(yv)); ctx.lineTo(W - padR, Y(yv)); ctx.stroke();
    ctx.fillText(yv.toFixed(2), 4, Y(yv) + 3);
    const xv = xMin + ((xMax - xMin) * i) / ticks;
    ctx.fillText(xv.toFixed(2), X(xv) - 10, H - 8);
  }

  for (const mark of opts.vlines || []) {
    if (!Number.isFinite(mark.x)) continue;
    ctx.strokeStyle = mark.color || "#8b98a5";
    ctx.setLineDash([4, 4]);
    ctx.beginPath(); ctx.moveTo(X(mark.x), padT); ctx.lineTo(X(mark.x), H - padB); ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = mark.color || "#8b98a5";
    ctx.fillText(mark.label, X(mark.x) + 4, padT + 10);
  }
  for (const mark of opts.hlines || []) {
    ctx.strokeStyle = mark.color || "#8b98a5";
    ctx.setLineDash([4, 4]);
    ctx.beginPath(); ctx.moveTo(padL, Y(mark.y)); ctx.lineTo(W - padR, Y(mark.y)); ctx.stroke();
    ctx.setLineDash([]);
  }

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.8;
    ctx.beginPath();
    for (let i = 0; i < s.x.length; i++) {
      const px = X(s.x[i]), py = Y(s.y[i]);
      if (i === 0) ctx.moveTo(px, py); else ctx.lineTo(px, py);
    }
    ctx.stroke();
  }

  let lx = padL + 10;
  for (const s of series) {
    ctx.fillStyle = s.color;
    ctx.fillText("— " + s.label, lx, padT + 10);
    lx += ctx.measureText("— " + s.label).width + 18;
  }
  for (const dot of opts.dots || []) {
    ctx.fillStyle = dot.color;
    ctx.beginPath(); ctx.arc(X(dot.x), Y(dot.y), 4, 0, 2 * Math.PI); ctx.fill();
  }
}

function bars(canvas, values, labels, color) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  const padL = 46, padB = 24, padT = 10, padR = 10;
  ctx.clearRect(0, 0, W, H);
  const max = Math.max(...values, 1e-12);
  const bw = (W - padL - padR) / Math.max(values.length, 1);
  ctx.font = "11px system-ui";
  for (let i = 0; i < values.length; i++) {
    const h = ((H - padT - padB) * values[i]) / max;
    ctx.fillStyle = color;
    ctx.fillRect(padL + i * bw + 2, H - padB - h, Math.max(bw - 4, 1), h);
    ctx.fillStyle = "#8b98a5";
    if (values.length <= 30 || i % Math.ceil(values.length / 30) === 0) {
      ctx.fillText(labels[i], padL + i * bw + 2, H - 8);
    }
  }
  ctx.fillStyle = "#8b98a5";
  ctx.fillText(max.toPrecision(3), 4, padT + 8);
}

// --- panels ----------------------------------------------------------------

function kpi(el, entries) {
  el.innerHTML = entries
    .map(([label, value, cls]) => `<div><span>${label}</span><b class="${cls || ""}">${value}</b></div>`)
    .join("");
}

function refreshReport(spec) {
  const r = JSON.parse(analyze(JSON.stringify(spec)));
  if (r.error) { kpi($("report-kpis"), [["error", r.error, "verdict no"]]); return null; }
  kpi($("report-kpis"), [
    ["mean degree λ", fmt(r.lambda)],
    ["branching ν", fmt(r.nu)],
    ["Q = 1 − p₁/λ", fmt(r.q)],
    ["retention Q̃", fmt(r.q_tilde)],
    ["one-round ν̃", fmt(r.nu_tilde)],
    ["giant component", r.subcritical ? "no (subcritical)" : "yes (supercritical)", `verdict ${r.subcritical ? "ok" : "no"}`],
    ["one-round optimal", r.one_step_quasi_optimal ? "yes — ν̃ < 1" : "no — ν̃ ≥ 1", `verdict ${r.one_step_quasi_optimal ? "ok" : "no"}`],
  ]);
  return r;
}

function refreshCriterionPlot(spec, report) {
  const c = JSON.parse(poisson_criterion_curve(3.0, 240));
  const dots = [];
  if (spec.kind === "poisson" && report) {
    dots.push({ x: spec.lambda, y: report.nu_tilde, color: "#f7c94b" });
  }
  plot($("criterion-plot"), [
    { x: c.lambdas, y: c.nu_tildes, color: "#53b1fd", label: "ν̃(λ) for poisson" },
  ], {
    hlines: [{ y: 1.0, color: "#ef6a6a" }],
    vlines: [{ x: c.lambda0, label: `λ₀ ≈ ${fmt(c.lambda0, 3)}`, color: "#46c28e" }],
    dots,
    yZero: true,
  });
}

function refreshStages(spec) {
  const r = JSON.parse(m1_stages(JSON.stringify(spec), 64));
  if (r.error) { kpi($("ratio-kpis"), [["error", r.error, "verdict no"]]); return; }
  kpi($("ratio-kpis"), [
    ["independence ratio α/n", fmt(r.ratio, 5)],
    ["stages used", r.stages_used],
    ["reached subcritical", r.terminated_subcritical ? "yes" : "no", `verdict ${r.terminated_subcritical ? "ok" : "no"}`],
  ]);
  let weight = 1;
  const contrib = [], labels = [];
  for (const s of r.stages.slice(0, 40)) {
    contrib.push(weight * s.ratio_increment);
    labels.push(String(s.stage));
    weight *= s.survivor_fraction;
  }
  bars($("stage-plot"), contrib, labels, "#53b1fd");

  const rows = r.stages.slice(0, 12).map((s) =>
    `<tr><td>${s.stage}</td><td>${fmt(s.lambda_i)}</td><td>${fmt(s.q_i)}</td><td>${fmt(s.q_tilde_i)}</td>` +
    `<td>${fmt(s.r_i)}</td><td>${fmt(s.survivor_fraction)}</td><td>${fmt(s.ratio_increment)}</td></tr>`).join("");
  $("stage-table").innerHTML =
    `<table><thead><tr><th>stage</th><th>λᵢ</th><th>Qᵢ</th><th>Q̃ᵢ</th><th>r</th><th>survivors</th><th>set increment</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`;
}

function refreshFluid(spec) {
  const c = JSON.parse(fluid_curve_samples(JSON.stringify(spec), 240));
  if (c.error) { plot($("fluid-plot"), []); return; }
  const shift = c.phase1_t[c.phase1_t.length - 1];
  plot($("fluid-plot"), [
    { x: c.phase1_t, y: c.phase1_u, color: "#53b1fd", label: "u (phase 1)" },
    { x: c.phase1_t, y: c.phase1_a, color: "#46c28e", label: "a (leaves)" },
    { x: c.phase2_t.map((t) => t + shift), y: c.phase2_u, color: "#9a7bff", label: "u (phase 2)" },
    { x: c.phase2_t.map((t) => t + shift), y: c.phase2_b, color: "#f7c94b", label: "b (blocked)" },
  ], {
    vlines: [
      { x: c.t1, label: `T₁ = ${fmt(c.t1, 3)}`, color: "#46c28e" },
      { x: Number.isFinite(c.t2) ? c.t2 + shift : NaN, label: `T₁+T₂ = ${fmt(c.t1 + c.t2, 3)}`, color: "#f7c94b" },
    ],
    yZero: true,
  });
}

function runDemo() {
  const spec = currentSpec();
  const n = Number($("n").value) || 20000;
  const seed = BigInt(Math.max(0, Math.floor(Number($("seed").value) || 0)));
  const r = JSON.parse(explore_demo(JSON.stringify(spec), n, seed));
  if (r.error) { kpi($("demo-kpis"), [["error", r.error, "verdict no"]]); return; }
  kpi($("demo-kpis"), [
    ["n", r.n],
    ["σ (set size)", r.sigma],
    ["σ/n realized", fmt(r.ratio, 5)],
    ["predicted α/n", fmt(r.predicted_ratio, 5)],
    ["gap", fmt(Math.abs(r.ratio - r.predicted_ratio), 5)],
    ["degree ≥ 2 selections", r.t1_violations, `verdict ${r.t1_violations <= r.n * 0.01 ? "ok" : "no"}`],
  ]);
  bars($("hist-plot"), r.selected_degree_hist, r.selected_degree_hist.map((_, i) => String(i)), "#46c28e");
}

function refreshAll() {
  const spec = currentSpec();
  const report = refreshReport(spec);
  refreshCriterionPlot(spec, report);
  refreshStages(spec);
  refreshFluid(spec);
}

await init();
$("status").textContent = "wasm ready";

$("kind").addEventListener("change", () => {
  const kind = $("kind").value;
  $("poisson-box").style.display = kind === "poisson" ? "" : "none";
  $("powerlaw-box").style.display = kind === "powerlaw" ? "" : "none";
  $("explicit-box").style.display = kind === "explicit" ? "" : "none";
  refreshAll();
});
$("lambda").addEventListener("input", () => { $("lambda-out").value = Number($("lambda").value).toFixed(2); refreshAll(); });
$("alpha").addEventListener("input", () => { $("alpha-out").value = Number($("alpha").value).toFixed(2); refreshAll(); });
$("mass").addEventListener("change", refreshAll);
$("sample").addEventListener("click", runDemo);

refreshAll();
