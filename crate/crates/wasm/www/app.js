import init, { blankRequest, predict, whatif, kappa, recovery } from "./pkg/rww_wasm.js";

const $ = (id) => document.getElementById(id);
const CONTROLS = ["characters", "figures", "tables", "videos", "rewards", "goal"];
const FLAGS = ["team_intro", "timeline"];

function fail(target, err) {
  target.innerHTML = "";
  const p = document.createElement("p");
  p.className = "error";
  p.textContent = String(err.message ?? err);
  target.appendChild(p);
}

function table(headers, rows) {
  const t = document.createElement("table");
  const head = t.insertRow();
  for (const h of headers) {
    const th = document.createElement("th");
    th.textContent = h;
    head.appendChild(th);
  }
  for (const r of rows) {
    const tr = t.insertRow();
    for (const cell of r) tr.insertCell().textContent = cell;
  }
  return t;
}

function buildForm(request) {
  const controls = $("controls");
  for (const name of CONTROLS) {
    const label = document.createElement("label");
    label.textContent = name + " ";
    const input = document.createElement("input");
    input.type = "number";
    input.id = "c-" + name;
    input.min = name === "goal" || name === "characters" ? "1" : "0";
    input.value = request.controls[name];
    label.appendChild(input);
    controls.appendChild(label);
  }
  for (const name of FLAGS) {
    const label = document.createElement("label");
    const input = document.createElement("input");
    input.type = "checkbox";
    input.id = "c-" + name;
    input.checked = request.controls[name];
    label.append(input, " " + name);
    controls.appendChild(label);
  }
  const ratings = $("ratings");
  for (const q of Object.keys(request.ratings)) {
    const label = document.createElement("label");
    label.textContent = q + " ";
    const select = document.createElement("select");
    select.id = "r-" + q;
    for (const v of ["0", "0.5", "1"]) select.add(new Option(v, v));
    label.appendChild(select);
    ratings.appendChild(label);
  }
}

function readForm(template) {
  const request = structuredClone(template);
  request.platform = $("platform").value;
  request.category = $("category").value;
  for (const name of CONTROLS) request.controls[name] = Number($("c-" + name).value);
  for (const name of FLAGS) request.controls[name] = $("c-" + name).checked;
  for (const q of Object.keys(request.ratings)) request.ratings[q] = Number($("r-" + q).value);
  return request;
}

function runPredict(template) {
  const out = $("predict-out");
  try {
    const body = JSON.stringify(readForm(template));
    const p = JSON.parse(predict(body));
    const w = JSON.parse(whatif(body));
    out.innerHTML = "";
    const summary = document.createElement("p");
    summary.textContent = `ln(amount) = ${p.ln_amount.toFixed(3)}, about $${Math.round(p.amount).toLocaleString()}`;
    out.appendChild(summary);
    const contributions = Object.entries(p.per_term_contributions)
      .filter(([, v]) => v !== 0)
      .map(([k, v]) => [k, v.toFixed(3)]);
    out.appendChild(table(["term", "contribution"], [["intercept", p.intercept.toFixed(3)], ...contributions]));
    const steps = document.createElement("p");
    steps.textContent = "Raising one rating by a step:";
    out.appendChild(steps);
    out.appendChild(table(
      ["factor", "now", "next", "change in ln(amount)"],
      w.entries.map((e) => [e.question, e.current, e.next ?? "max", e.delta_ln_amount.toFixed(3)]),
    ));
  } catch (err) {
    fail(out, err);
  }
}

function runKappa() {
  const out = $("kappa-out");
  try {
    const k = JSON.parse(kappa($("kappa-a").value, $("kappa-b").value, $("kappa-linear").checked));
    out.textContent = `kappa ${k.kappa.toFixed(4)} over ${k.items} items; ` +
      (k.repeatable ? "meets" : "below") + " the 0.80 repeatability gate";
  } catch (err) {
    fail(out, err);
  }
}

function runRecovery() {
  const out = $("recovery-out");
  out.textContent = "running...";
  setTimeout(() => {
    try {
      const r = JSON.parse(recovery(Number($("rec-sigma").value), Number($("rec-trials").value), Number($("rec-seed").value)));
      out.innerHTML = "";
      const p = document.createElement("p");
      p.textContent = `recall ${r.recall.toFixed(2)}, exact match ${r.exact_match.toFixed(2)}, failed trials ${r.failed_trials}`;
      out.appendChild(p);
      out.appendChild(table(
        ["factor", "planted", "selection rate"],
        Object.entries(r.selection_rates).map(([q, v]) => [q, r.target.includes(q) ? "yes" : "", v.toFixed(2)]),
      ));
    } catch (err) {
      fail(out, err);
    }
  }, 0);
}

await init();
const template = JSON.parse(blankRequest());
buildForm(template);
$("run-predict").addEventListener("click", () => runPredict(template));
$("run-kappa").addEventListener("click", runKappa);
$("run-recovery").addEventListener("click", runRecovery);
runPredict(template);
