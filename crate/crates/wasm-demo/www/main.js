import init, { tableHtml, skillCurve, analyzeReturns } from "./pkg/sharpe_wasm_demo.js";

const TESTS = ["wald-studentized", "student-one", "student-two", "fisher", "wald-raw", "wald-modified"];

function fail(el, err) {
  el.innerHTML = "";
  const p = document.createElement("p");
  p.className = "error";
  p.textContent = String(err && err.message ? err.message : err);
  el.appendChild(p);
}

function buildTable() {
  const f = document.getElementById("table-form").elements;
  const out = document.getElementById("table-out");
  try {
    out.innerHTML = tableHtml(f.kind.value, f.test.value, f.freq.value, Number(f.target.value));
  } catch (e) {
    fail(out, e);
  }
}

function plotCurve() {
  const f = document.getElementById("curve-form").elements;
  const svg = document.getElementById("curve");
  const W = 800, H = 320, pad = 30;
  let pts;
  try {
    pts = skillCurve(f.test.value, Number(f.f.value), Number(f.rho.value), Number(f.sharpe.value), Number(f.nmax.value));
  } catch (e) {
    svg.innerHTML = `<text x="${pad}" y="${pad}" fill="#b00020">${String(e.message || e)}</text>`;
    return;
  }
  const nMax = pts[pts.length - 2];
  const x = (n) => pad + (n / nMax) * (W - 2 * pad);
  const y = (p) => H - pad - p * (H - 2 * pad);
  let line = "";
  for (let i = 0; i < pts.length; i += 2) line += `${x(pts[i]).toFixed(1)},${y(pts[i + 1]).toFixed(1)} `;
  let grid = "";
  for (const p of [0.5, 0.8, 0.9, 0.95, 0.99]) {
    grid += `<line x1="${pad}" x2="${W - pad}" y1="${y(p)}" y2="${y(p)}" stroke="#ddd"/>`;
    grid += `<text x="2" y="${y(p) + 4}" font-size="10">${p * 100}%</text>`;
  }
  svg.innerHTML = `${grid}
    <line x1="${pad}" x2="${W - pad}" y1="${H - pad}" y2="${H - pad}" stroke="#888"/>
    <text x="${W - pad}" y="${H - 8}" font-size="10" text-anchor="end">N = ${nMax}</text>
    <polyline points="${line}" fill="none" stroke="#1f5fbf" stroke-width="2"/>`;
}

function fmt(v, d = 4) {
  return typeof v === "number" ? v.toFixed(d) : String(v);
}

function analyze() {
  const f = document.getElementById("analyze-form").elements;
  const out = document.getElementById("analyze-out");
  const rho = f.rho.value.trim() === "auto" ? NaN : Number(f.rho.value);
  let r;
  try {
    r = JSON.parse(analyzeReturns(f.text.value, Number(f.f.value), rho));
  } catch (e) {
    fail(out, e);
    return;
  }
  const rows = r.tests
    .map((t) => `<tr><td>${t.test}</td><td>${fmt(t.statistic)}</td><td>${fmt(t.luck)}</td><td class="${t.skill_class}">${fmt(t.skill * 100, 1)}%</td></tr>`)
    .join("");
  out.innerHTML = `
    <p>N = ${r.n}, annualized Sharpe <span class="${r.sharpe_class}">&nbsp;${fmt(r.sr_annual_sqrt, 3)}&nbsp;</span>,
       &rho; = ${fmt(r.rho.value)} (${r.rho.source}), &delta; = ${fmt(r.delta)},
       autocorrelation-adjusted Sharpe ${fmt(r.sr_annual_adjusted, 3)}</p>
    <table id="report"><tr><th>test</th><th>statistic</th><th>luck</th><th>skill</th></tr>${rows}</table>`;
}

function sampleData() {
  // AR(1) returns with a modest positive drift.
  let e = 0, seed = 12345;
  const rand = () => (seed = (seed * 1103515245 + 12345) % 2147483648) / 2147483648;
  const lines = [];
  for (let i = 0; i < 756; i++) {
    const z = Math.sqrt(-2 * Math.log(rand() + 1e-12)) * Math.cos(2 * Math.PI * rand());
    e = 0.15 * e + 0.01 * z;
    lines.push((0.0006 + e).toFixed(6));
  }
  document.getElementById("analyze-form").elements.text.value = lines.join("\n");
}

await init();
for (const sel of document.querySelectorAll("select.tests")) {
  sel.innerHTML = TESTS.map((t) => `<option>${t}</option>`).join("");
}
for (const [id, fn] of [["table-form", buildTable], ["curve-form", plotCurve], ["analyze-form", analyze]]) {
  document.getElementById(id).addEventListener("submit", (ev) => {
    ev.preventDefault();
    fn();
  });
}
document.getElementById("sample").addEventListener("click", sampleData);
buildTable();
plotCurve();
