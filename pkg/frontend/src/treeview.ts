// Rule/tree view: collapsible decision tree with engineering-unit
// thresholds, the extracted rule list, and leaf linear models.
// Splits whose children continue with different features (the dependence
// hint) are highlighted.

import { formatValue, formatWithUnit } from "./format.js";
import { bindValue, clearValues } from "./provenance.js";
import { TreeNodeJson, TreeResponse } from "./types.js";

function renderNode(
  node: TreeNodeJson,
  unit: string,
  path: string,
): HTMLElement {
  if (!node.feature) {
    const leaf = document.createElement("div");
    leaf.className = "tree-leaf";
    leaf.textContent = `${formatWithUnit(node.prediction, unit)} (n=${node.count})`;
    leaf.setAttribute("data-value", String(node.prediction));
    return leaf;
  }
  const details = document.createElement("details");
  details.open = node.depth < 2;
  details.className = "tree-split";
  if (node.dependence_flag) details.classList.add("dependence");
  const summary = document.createElement("summary");
  summary.textContent = `${node.feature} ≤ ${formatValue(node.threshold!, 4)} ${node.unit === "-" ? "" : node.unit}`.trimEnd();
  if (node.dependence_flag) {
    const mark = document.createElement("span");
    mark.className = "dependence-mark";
    mark.title = "children split on different features: branch-specific rule";
    mark.textContent = " ⚑";
    summary.appendChild(mark);
  }
  details.appendChild(summary);

  const left = document.createElement("div");
  left.className = "tree-branch left";
  left.append(branchLabel("yes"), renderNode(node.left!, unit, `${path}L`));
  const right = document.createElement("div");
  right.className = "tree-branch right";
  right.append(branchLabel("no"), renderNode(node.right!, unit, `${path}R`));
  details.append(left, right);
  return details;
}

function branchLabel(text: string): HTMLElement {
  const el = document.createElement("span");
  el.className = "branch-label";
  el.textContent = text;
  return el;
}

export function renderTree(container: HTMLElement, res: TreeResponse): void {
  clearValues("tree.");
  container.innerHTML = "";

  const title = document.createElement("h4");
  title.textContent = `local surrogate for ${res.tree.target.name} [${res.tree.target.unit}]`;
  container.appendChild(title);

  if (!res.tree.root.feature) {
    const msg = document.createElement("p");
    msg.className = "single-leaf";
    msg.textContent =
      `no split found: constant prediction ${formatWithUnit(res.tree.root.prediction, res.tree.target.unit)}`;
    container.appendChild(msg);
  } else {
    container.appendChild(renderNode(res.tree.root, res.tree.target.unit, "r"));
  }

  const rulesTitle = document.createElement("h4");
  rulesTitle.textContent = `rules (${res.rules.length})`;
  container.appendChild(rulesTitle);
  const list = document.createElement("ol");
  list.className = "rule-list";
  res.rules.forEach((rule, i) => {
    const li = document.createElement("li");
    li.className = "rule";
    if (rule.under_dependence) li.classList.add("dependence");
    li.textContent = rule.text;
    bindValue(li, `tree.rule.${i}`, {
      label: `rule ${i} prediction`,
      value: rule.prediction,
      source: `POST /tree -> .rules[${i}].prediction`,
    });
    list.appendChild(li);
  });
  container.appendChild(list);

  if (res.leaf_models.length) {
    const lmTitle = document.createElement("h4");
    lmTitle.textContent = "leaf linear models";
    container.appendChild(lmTitle);
    const lmList = document.createElement("ul");
    lmList.className = "leaf-model-list";
    for (const lm of res.leaf_models) {
      const li = document.createElement("li");
      const terms = lm.terms
        .map((t) => `${formatValue(t.coefficient, 4)}·${t.feature}`)
        .join(" + ");
      li.textContent =
        `leaf ${lm.leaf}: ${res.tree.target.name} ≈ ${terms} + ${formatValue(lm.intercept, 4)} [${lm.target_unit}] (n=${lm.count})`;
      lmList.appendChild(li);
    }
    container.appendChild(lmList);
  }
}
