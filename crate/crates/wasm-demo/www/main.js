import init, { defaultCircuit, circuitInfo, simulate, landscape, quantumTrainXor } from "./pkg/qmlkit_wasm_demo.js";

const $ = (id) => document.getElementById(id);
let circuit = "";
let theta = new Float64Array(0);

function fmt(v) {
  return Math.abs(v) < 5e-5 ? "0" : v.toFixed(4);
}

function loadCircuit() {
  $("circuit-err").textContent = "";
  let info;
  try {
    info = JSON.parse(circuitInfo($("circuit").value));
  } catch (e) {
    $("circuit-err").textContent = e.message;
    return;
  }
  circuit = $("circuit").value;
  theta = new Float64Array(info.n_params);
  const sliders = $("sliders");
  sliders.innerHTML = "";
  const slot = $("slot");
  slot.innerHTML = "";
  for (let k = 0; k < info.n_params; k++) {
    const row = document.createElement("div");
    row.className = "slider";
    row.innerHTML = `<span>&theta;<sub>${k}</sub></span><input type="range" min="-3.1416" max="3.1416" step="0.01" value="0"><span>0.00</span>`;
    const input = row.querySelector("input");
    const label = row.querySelectorAll("span")[1];
    input.addEventListener("input", () => {
      theta[k] = parseFloat(input.value);
      label.textContent = theta[k].toFixed(2);
      refresh();
    });
    sliders.appendChild(row);
    slot.add(new Option(`θ${k}`, k));
  }
  if (info.n_params === 0) sliders.textContent = "This circuit has no trainable parameters.";
  refresh();
}

function refresh() {
  let out;
  try {
    out = JSON.parse(simulate(circuit, theta));
  } catch (e) {
    $("circuit-err").textContent = e.message;
    return;
  }
  $("probs").innerHTML = out.labels
    .map((l, i) => `<div class="bar"><span>|${l}&rang;</span><div style="width:${(out.probabilities[i] * 240).toFixed(1)}px"></div><span>${fmt(out.probabilities[i])}</span></div>`)
    .join("");
  $("expect").innerHTML = out.expectations.map((v, i) => `<div>observable ${i}: ${fmt(v)}</div>`).join("");
  drawLandscape();
}

function drawLandscape() {
  const canvas = $("landscape");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (theta.length === 0) return;
  const slot = parseInt($("slot").value || "0", 10);
  let data;
  try {
    data = JSON.parse(landscape(circuit, theta, slot, 121));
  } catch (e) {
    ctx.fillText(e.message, 10, 20);
    return;
  }
  const W = canvas.width, H = canvas.height;
  const x = (a) => ((a + Math.PI) / (2 * Math.PI)) * (W - 20) + 10;
  const y = (v) => H / 2 - v * (H / 2 - 15);
  ctx.strokeStyle = "#ccc";
  ctx.beginPath();
  ctx.moveTo(10, y(0)); ctx.lineTo(W - 10, y(0));
  ctx.moveTo(x(0), 5); ctx.lineTo(x(0), H - 5);
  ctx.stroke();
  const curve = (vals, color) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    data.angles.forEach((a, i) => (i ? ctx.lineTo(x(a), y(vals[i])) : ctx.moveTo(x(a), y(vals[i]))));
    ctx.stroke();
  };
  curve(data.values, "#4a7bd0");
  curve(data.gradients, "#e08a2c");
  const here = JSON.parse(simulate(circuit, theta)).expectations[0];
  ctx.fillStyle = "#222";
  ctx.beginPath();
  ctx.arc(x(theta[slot]), y(here), 5, 0, 2 * Math.PI);
  ctx.fill();
  ctx.fillText("−π", 8, H - 4);
  ctx.fillText("π", W - 16, H - 4);
}

function runQt() {
  $("qt-err").textContent = "";
  const hidden = parseInt($("qt-hidden").value, 10);
  const sizes = new Uint32Array([2, hidden, 1]);
  const t0 = performance.now();
  let out;
  try {
    out = JSON.parse(
      quantumTrainXor(sizes, parseInt($("qt-layers").value, 10), parseInt($("qt-epochs").value, 10), parseInt($("qt-seed").value, 10)),
    );
  } catch (e) {
    $("qt-err").textContent = e.message;
    return;
  }
  const ms = performance.now() - t0;
  const last = out.losses[out.losses.length - 1];
  $("qt-summary").textContent =
    `${out.n_weights} network weights from ${out.n_qubits} qubits (${out.trainable} trained values); final loss ${last.toExponential(2)} in ${ms.toFixed(0)} ms.`;
  $("qt-table").innerHTML =
    "<tr><th>x</th><th>target</th><th>prediction</th></tr>" +
    out.inputs.map((x, i) => `<tr><td>(${x.join(", ")})</td><td>${out.targets[i][0]}</td><td>${out.predictions[i].toFixed(4)}</td></tr>`).join("");

  const canvas = $("qt-loss");
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  ctx.clearRect(0, 0, W, H);
  const logs = out.losses.map((l) => Math.log10(Math.max(l, 1e-16)));
  const hi = Math.max(...logs), lo = Math.min(...logs);
  const x = (i) => 30 + (i / Math.max(1, logs.length - 1)) * (W - 40);
  const y = (v) => 10 + ((hi - v) / Math.max(1e-9, hi - lo)) * (H - 30);
  ctx.strokeStyle = "#4a7bd0";
  ctx.lineWidth = 2;
  ctx.beginPath();
  logs.forEach((v, i) => (i ? ctx.lineTo(x(i), y(v)) : ctx.moveTo(x(i), y(v))));
  ctx.stroke();
  ctx.fillStyle = "#222";
  ctx.fillText(`1e${hi.toFixed(0)}`, 2, 14);
  ctx.fillText(`1e${lo.toFixed(0)}`, 2, H - 18);
  ctx.fillText("loss (log scale) by epoch", W / 2 - 60, H - 4);
}

await init();
$("circuit").value = defaultCircuit();
$("load").addEventListener("click", loadCircuit);
$("slot").addEventListener("change", drawLandscape);
$("qt-run").addEventListener("click", runQt);
loadCircuit();
