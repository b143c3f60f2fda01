import init, { RoundTrip, gamma_curves, simplex_weights, dihedral_view, dihedral_matches_mosaic } from "./pkg/revisp_wasm.js";

const $ = (id) => document.getElementById(id);

function paint(canvas, rgba, width, height) {
  canvas.width = width;
  canvas.height = height;
  const img = new ImageData(new Uint8ClampedArray(rgba), width, height);
  canvas.getContext("2d").putImageData(img, 0, 0);
}

function roundTrip() {
  for (const id of ["rt-wbr", "rt-wbb", "rt-gain"]) $(id + "-v").value = $(id).value;
  let rt;
  try {
    rt = new RoundTrip(Number($("rt-seed").value), Number($("rt-size").value),
      Number($("rt-wbr").value), Number($("rt-wbb").value));
  } catch (e) {
    $("rt-metrics").textContent = String(e);
    return;
  }
  const [w, h] = [rt.width(), rt.height()];
  paint($("rt-raw"), rt.raw_rgba(), w, h);
  paint($("rt-srgb"), rt.srgb_rgba(), w, h);
  paint($("rt-err"), rt.error_rgba(Number($("rt-gain").value)), w, h);
  $("rt-metrics").textContent = `PSNR ${rt.psnr().toFixed(2)} dB   SSIM ${rt.ssim().toFixed(4)}`;
  rt.free();
}

const GAMMAS = [1.0, 2.2, 2.4];
const COLORS = ["#1f77b4", "#2ca02c", "#d62728"];
const SAMPLES = 101;

function gammaPlot() {
  const raw = GAMMAS.map((_, k) => Number($(`gm-w${k}`).value));
  const w = simplex_weights(new Float64Array(raw));
  const curves = gamma_curves(new Float64Array(GAMMAS), new Float64Array(raw), SAMPLES);
  const canvas = $("gm-plot");
  const ctx = canvas.getContext("2d");
  const [W, H, pad] = [canvas.width, canvas.height, 24];
  ctx.clearRect(0, 0, W, H);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  const line = (offset, color, width) => {
    ctx.beginPath();
    for (let i = 0; i < SAMPLES; i++) {
      const x = pad + (i / (SAMPLES - 1)) * (W - 2 * pad);
      const y = H - pad - curves[offset + i] * (H - 2 * pad);
      i ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
    }
    ctx.strokeStyle = color;
    ctx.lineWidth = width;
    ctx.stroke();
  };
  GAMMAS.forEach((_, k) => line(k * SAMPLES, COLORS[k], 1));
  line(GAMMAS.length * SAMPLES, "#000", 3);
  $("gm-weights").textContent = "weights " + Array.from(w, (v, k) => `γ=${GAMMAS[k]}: ${v.toFixed(3)}`).join("  ");
}

function buildGammaControls() {
  const box = $("gm-controls");
  GAMMAS.forEach((g, k) => {
    const label = document.createElement("label");
    label.style.color = COLORS[k];
    label.textContent = `γ = ${g} `;
    const input = document.createElement("input");
    Object.assign(input, { id: `gm-w${k}`, type: "range", min: 0, max: 1, step: 0.01, value: k === 0 ? 0.6 : 0.2 });
    input.addEventListener("input", gammaPlot);
    label.appendChild(input);
    box.appendChild(label);
  });
}

const DH_SEED = 3;
const DH_SIZE = 16;

function dihedral() {
  const t = ($("dh-h").checked ? 1 : 0) | ($("dh-v").checked ? 2 : 0) | ($("dh-t").checked ? 4 : 0);
  paint($("dh-src"), dihedral_view(DH_SEED, DH_SIZE, 0), 2 * DH_SIZE, 2 * DH_SIZE);
  paint($("dh-out"), dihedral_view(DH_SEED, DH_SIZE, t), 2 * DH_SIZE, 2 * DH_SIZE);
  const ok = dihedral_matches_mosaic(DH_SEED, DH_SIZE, t);
  $("dh-caption").textContent = `transform ${t}: ${ok ? "matches" : "differs from"} the full-mosaic transform`;
}

await init();
for (const id of ["rt-seed", "rt-size", "rt-wbr", "rt-wbb", "rt-gain"]) $(id).addEventListener("input", roundTrip);
for (const id of ["dh-h", "dh-v", "dh-t"]) $(id).addEventListener("change", dihedral);
buildGammaControls();
roundTrip();
gammaPlot();
dihedral();
