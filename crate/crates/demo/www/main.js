import init, { etaEnvironment, busemannHistogram, twoRowCoupling } from "./pkg/lpplab_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function guard(msgId, f) {
  try {
    $(msgId).textContent = "";
    $(msgId).className = "";
    f();
  } catch (e) {
    $(msgId).textContent = String(e);
    $(msgId).className = "err";
  }
}

function drawEta() {
  guard("eta-msg", () => {
    const v = JSON.parse(etaEnvironment(num("eta-k"), num("eta-l"), $("eta-r").value, num("eta-seed")));
    const field = v[$("eta-show").value];
    const c = $("eta-canvas");
    const g = c.getContext("2d");
    g.clearRect(0, 0, c.width, c.height);
    const cell = Math.min(c.width / v.width, c.height / v.height);
    const finite = field.filter((x) => x !== null && x > 0);
    const top = finite.length ? Math.max(...finite) : 1;
    const at = (col, row) => [(col - 1) * cell, c.height - row * cell];
    for (let row = 1; row <= v.height; row++) {
      for (let col = 1; col <= v.width; col++) {
        const i = (row - 1) * v.width + (col - 1);
        const [x, y] = at(col, row);
        if (v.zero[i]) {
          g.fillStyle = "#ddd";
        } else if (field[i] === null) {
          g.fillStyle = "#fff";
        } else {
          const s = Math.round(255 * (1 - Math.min(field[i] / top, 1)));
          g.fillStyle = `rgb(255, ${s}, ${s})`;
        }
        g.fillRect(x, y, cell, cell);
        g.strokeStyle = "#eee";
        g.strokeRect(x, y, cell, cell);
      }
    }
    g.strokeStyle = "#1f5fbf";
    g.lineWidth = 3;
    g.beginPath();
    v.geodesic.forEach(([col, row], n) => {
      const [x, y] = at(col, row);
      if (n === 0) g.moveTo(x + cell / 2, y + cell / 2);
      else g.lineTo(x + cell / 2, y + cell / 2);
    });
    g.stroke();
    g.strokeStyle = "#c00";
    for (const [col, row] of v.terminals) {
      const [x, y] = at(col, row);
      g.strokeRect(x + 2, y + 2, cell - 4, cell - 4);
    }
    $("eta-msg").textContent = `${v.width} × ${v.height} box, geodesic of ${v.geodesic.length} cells`;
  });
}

function drawHistogram() {
  guard("hist-msg", () => {
    const h = JSON.parse(busemannHistogram(num("hist-r"), num("hist-n"), num("hist-bins"), num("hist-seed")));
    const c = $("hist-canvas");
    const g = c.getContext("2d");
    g.clearRect(0, 0, c.width, c.height);
    const top = Math.max(...h.counts, ...h.expected) * 1.05;
    const w = c.width / h.counts.length;
    g.fillStyle = "#9ab";
    h.counts.forEach((n, b) => {
      const bar = (n / top) * c.height;
      g.fillRect(b * w + 1, c.height - bar, w - 2, bar);
    });
    g.strokeStyle = "#c00";
    g.lineWidth = 2;
    g.beginPath();
    h.expected.forEach((e, b) => {
      const y = c.height - (e / top) * c.height;
      if (b === 0) g.moveTo(b * w + w / 2, y);
      else g.lineTo(b * w + w / 2, y);
    });
    g.stroke();
    $("hist-msg").textContent = `ζ = ${h.zeta.toFixed(4)}, sample mean ${h.mean.toFixed(4)} (1/ζ = ${(1 / h.zeta).toFixed(4)})`;
  });
}

function drawCoupling() {
  guard("cp-msg", () => {
    const v = JSON.parse(twoRowCoupling(num("cp-len"), num("cp-b1"), num("cp-b2"), num("cp-seed")));
    const c = $("cp-canvas");
    const g = c.getContext("2d");
    g.clearRect(0, 0, c.width, c.height);
    const band = c.height / 3;
    const n = v.row1.length;
    const w = c.width / n;
    const top = Math.max(...v.row1, ...v.row2, ...v.swapped1, ...v.swapped2);
    const bars = (a, b, y0) => {
      for (let t = 0; t < n; t++) {
        g.fillStyle = "#aaa";
        g.fillRect(t * w + 1, y0 - (a[t] / top) * (band - 10), w / 2 - 1, (a[t] / top) * (band - 10));
        g.fillStyle = "#222";
        g.fillRect(t * w + w / 2, y0 - (b[t] / top) * (band - 10), w / 2 - 1, (b[t] / top) * (band - 10));
      }
    };
    bars(v.row1, v.row2, band);
    bars(v.swapped1, v.swapped2, 2 * band);
    const qTop = Math.max(...v.queue, 1e-9);
    g.strokeStyle = "#1f5fbf";
    g.beginPath();
    v.queue.forEach((q, t) => {
      const x = (t / (v.queue.length - 1)) * c.width;
      const y = 3 * band - (q / qTop) * (band - 10);
      if (t === 0) g.moveTo(x, y);
      else g.lineTo(x, y);
    });
    g.stroke();
    $("cp-msg").textContent = `max queue ${qTop.toFixed(3)}`;
  });
}

await init();
$("eta-go").onclick = drawEta;
$("eta-show").onchange = drawEta;
$("hist-go").onclick = drawHistogram;
$("cp-go").onclick = drawCoupling;
drawEta();
drawHistogram();
drawCoupling();
