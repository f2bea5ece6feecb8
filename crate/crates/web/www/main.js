import init, { portrait, avoid, analyze, version } from "./pkg/skewtorus_web.js";

const $ = (id) => document.getElementById(id);

const presets = {
  jordan: { dimension: 2, matrix: [[0, 1], [-1, 1]],
            queries: [{ type: "skewPoly" }, { type: "skewLaurent" }, { type: "dichotomy" }] },
  cat: { dimension: 2, matrix: [[2, 1], [1, 1]],
         queries: [{ type: "skewPoly" }, { type: "skewLaurent" }, { type: "oracle", level: 11 }] },
  q: { dimension: 1, matrix: [[1]], freeGenerators: ["q"], translation: [{ free: { q: "1" } }],
       queries: [{ type: "skewPoly" }, { type: "skewLaurent" }] },
  zeta: { dimension: 1, matrix: [[1]], translation: [{ torsion: "1/3" }],
          queries: [{ type: "skewPoly" }, { type: "skewLaurent" }] },
};

function matrix() {
  return ["m00", "m01", "m10", "m11"].map((id) => parseInt($(id).value, 10) || 0);
}

function colour(p, maxP) {
  if (p === 0) return "#ffffff";
  const h = (Math.log(p) / Math.log(Math.max(maxP, 2))) * 280;
  return `hsl(${h.toFixed(0)}, 70%, 50%)`;
}

function drawCells(canvas, n, fill) {
  const ctx = canvas.getContext("2d");
  const s = canvas.width / n;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const c = fill(i, j);
      if (!c) continue;
      ctx.fillStyle = c;
      // a_1 runs left to right, a_2 bottom to top
      ctx.fillRect(i * s, canvas.height - (j + 1) * s, Math.ceil(s), Math.ceil(s));
    }
  }
}

function drawPortrait() {
  const [a, b, c, d] = matrix();
  const n = parseInt($("level").value, 10);
  try {
    const r = JSON.parse(portrait(a, b, c, d, $("t1").value, $("t2").value, n));
    const maxP = Math.max(...r.periods);
    drawCells($("grid"), n, (i, j) => colour(r.periods[i * n + j], maxP));
    $("stats").textContent = `${r.periodic} of ${n * n} points periodic`;
    $("legend").innerHTML = Object.entries(r.pointsByPeriod)
      .sort((x, y) => x[0] - y[0])
      .map(([p, k]) => `<span style="background:${colour(+p, maxP)}">${p}</span>×${k}`)
      .join(" ");
  } catch (e) {
    $("stats").innerHTML = `<span class="err">${e.message ?? e}</span>`;
    $("legend").textContent = "";
  }
}

const gcd = (a, b) => (b === 0 ? a : gcd(b, a % b));
const lcm = (a, b) => (a / gcd(a, b)) * b;

function frac(s) {
  const [p, q] = s.split("/").map(Number);
  return p / (q ?? 1);
}

function drawAvoid() {
  const [a, b, c, d] = matrix();
  let cosets;
  try {
    cosets = JSON.parse($("cosets").value);
    const r = JSON.parse(avoid(a, b, c, d, $("cosets").value, parseInt($("budget").value, 10)));
    const level = r.point.map((x) => Number(x.split("/")[1] ?? 1)).reduce(lcm, 1);
    if (level > 400) throw new Error(`orbit level ${level} is too fine to draw`);
    const onOrbit = new Set(r.orbit.map((x) => x.map(frac).map((v) => Math.round(v * level)).join(",")));
    const inCoset = (i, j) =>
      cosets.some((cs) =>
        cs.characters.every((w, k) => {
          const v = (w[0] * i + w[1] * j) / level - frac(cs.targets[k]);
          return Math.abs(v - Math.round(v)) < 1e-9;
        }));
    drawCells($("orbit"), level, (i, j) =>
      onOrbit.has(`${i},${j}`) ? "#d33" : inCoset(i, j) ? "#bbb" : null);
    $("avoidOut").textContent = JSON.stringify(r, null, 1);
  } catch (e) {
    $("avoidOut").innerHTML = `<span class="err">${e.message ?? e}</span>`;
  }
}

function runSpec() {
  const r = JSON.parse(analyze($("spec").value, $("verify").checked));
  $("report").textContent = JSON.stringify(r, null, 1);
  if (r.error) {
    $("summary").innerHTML = `<span class="err">line ${r.error.line}, column ${r.error.column}: ${r.error.message}</span>`;
    return;
  }
  $("summary").innerHTML = r.results
    .map((q) => {
      if (q.status !== "ok") return `${q.index} ${q.query}: <span class="err">${q.error.message}</span>`;
      const v = q.result;
      if ("primitive" in v) return `${q.index} ${q.query}: primitive = ${v.primitive}, σ order ${v.sigmaOrder}`;
      if ("verdict" in v) return `${q.index} ${q.query}: verdict ${v.verdict}`;
      return `${q.index} ${q.query}: ok`;
    })
    .join("<br>");
}

await init();
$("version").textContent = version();
$("draw").onclick = drawPortrait;
$("avoid").onclick = drawAvoid;
$("run").onclick = runSpec;
for (const btn of document.querySelectorAll("[data-preset]")) {
  btn.onclick = () => { $("spec").value = JSON.stringify(presets[btn.dataset.preset], null, 2); runSpec(); };
}
$("spec").value = JSON.stringify(presets.jordan, null, 2);
drawPortrait();
