import type { AppState, CaseState, Toast } from "./state";
import { argumentsById } from "./state";
import { buildFlowGraph } from "./layout/layered";
import type { FlowGraph, FlowNode } from "./layout/layered";
import { forceLayout } from "./layout/force";
import {
  argumentGraphView,
  checkAnswerForm,
  clusterTooltip,
  cqQueue,
  findingBadges,
  formatBtc,
} from "./viewmodel";
import type { ArgumentGraphView } from "./viewmodel";
import type { CqRow, CqState } from "./types";

export interface Handlers {
  selectCase(caseId: string): void;
  answer(argId: string, cqId: string, answer: CqState, justification: string): void;
  formError(message: string): void;
  retry(): void;
  dismissToast(id: number): void;
}

const SVG_NS = "http://www.w3.org/2000/svg";

type Attrs = Record<string, string>;

function el(tag: string, attrs: Attrs = {}, children: (Node | string)[] = []): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  for (const child of children) {
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}

function svg(tag: string, attrs: Attrs = {}, children: (Node | string)[] = []): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  for (const child of children) {
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}

function svgTitle(text: string): SVGElement {
  return svg("title", {}, [text]);
}

// ---------------------------------------------------------------------------
// Cluster flow graph
// ---------------------------------------------------------------------------

const FLOW_COL = 190;
const FLOW_ROW = 74;
const FLOW_PAD = 30;
const NODE_W = 150;
const NODE_H = 46;

function flowNodeCenter(node: FlowNode): { x: number; y: number } {
  return {
    x: FLOW_PAD + node.layer * FLOW_COL + NODE_W / 2,
    y: FLOW_PAD + node.row * FLOW_ROW + NODE_H / 2,
  };
}

function flowNodeLabel(node: FlowNode): string {
  if (node.entities.length > 0) return node.entities.join(", ");
  const first = node.addresses[0] ?? "?";
  const extra = node.addresses.length - 1;
  return extra > 0 ? `${first} +${extra}` : first;
}

export function renderFlowGraph(graph: FlowGraph): SVGElement {
  let maxRow = 0;
  for (const node of graph.nodes) maxRow = Math.max(maxRow, node.row);
  const width = FLOW_PAD * 2 + Math.max(graph.layerCount, 1) * FLOW_COL;
  const height = FLOW_PAD * 2 + (maxRow + 1) * FLOW_ROW;
  const root = svg("svg", {
    viewBox: `0 0 ${width} ${height}`,
    width: String(width),
    height: String(height),
    class: "flow-graph",
    role: "img",
  });
  const defs = svg("defs", {}, [
    svg("marker", {
      id: "flow-arrow",
      viewBox: "0 0 10 10",
      refX: "9",
      refY: "5",
      markerWidth: "7",
      markerHeight: "7",
      orient: "auto-start-reverse",
    }, [svg("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: "#7a8699" })]),
  ]);
  root.append(defs);

  const centers = new Map(graph.nodes.map((n) => [n.id, flowNodeCenter(n)]));
  for (const edge of graph.edges) {
    const from = centers.get(edge.from);
    const to = centers.get(edge.to);
    if (!from || !to) continue;
    const line = svg("line", {
      x1: String(from.x + NODE_W / 2 - 4),
      y1: String(from.y),
      x2: String(to.x - NODE_W / 2 - 6),
      y2: String(to.y),
      class: edge.coinjoin ? "flow-edge coinjoin" : "flow-edge",
      "marker-end": "url(#flow-arrow)",
    });
    line.append(svgTitle(
      `${edge.txid}: ${formatBtc(edge.valueSat)}${edge.coinjoin ? " (coinjoin-shaped)" : ""}`,
    ));
    root.append(line);
  }

  for (const node of graph.nodes) {
    const center = flowNodeCenter(node);
    const group = svg("g", {
      class: node.entities.length > 0 ? "flow-node tagged" : "flow-node",
      "data-node-id": node.id,
    });
    group.append(svgTitle(clusterTooltip(node)));
    group.append(svg("rect", {
      x: String(center.x - NODE_W / 2),
      y: String(center.y - NODE_H / 2),
      width: String(NODE_W),
      height: String(NODE_H),
      rx: "8",
    }));
    group.append(svg("text", {
      x: String(center.x),
      y: String(center.y - 2),
      "text-anchor": "middle",
      class: "flow-label",
    }, [flowNodeLabel(node)]));
    group.append(svg("text", {
      x: String(center.x),
      y: String(center.y + 14),
      "text-anchor": "middle",
      class: "flow-sublabel",
    }, [`${node.addresses.length} address${node.addresses.length === 1 ? "" : "es"}`]));
    root.append(group);
  }
  return root;
}

// ---------------------------------------------------------------------------
// Argument graph
// ---------------------------------------------------------------------------

const ARG_W = 880;
const ARG_H = 520;
const ARG_R = 22;

export function renderArgumentGraph(view: ArgumentGraphView): SVGElement {
  const positions = forceLayout(
    view.nodes.map((n) => n.id),
    view.edges.map((e) => ({ from: e.from, to: e.to })),
    { width: ARG_W, height: ARG_H },
  );
  const root = svg("svg", {
    viewBox: `0 0 ${ARG_W} ${ARG_H}`,
    width: String(ARG_W),
    height: String(ARG_H),
    class: "argument-graph",
    role: "img",
  });
  root.append(svg("defs", {}, [
    svg("marker", {
      id: "attack-arrow",
      viewBox: "0 0 10 10",
      refX: "9",
      refY: "5",
      markerWidth: "8",
      markerHeight: "8",
      orient: "auto-start-reverse",
    }, [svg("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: "#555" })]),
  ]));

  for (const edge of view.edges) {
    const from = positions.get(edge.from);
    const to = positions.get(edge.to);
    if (!from || !to) continue;
    const dx = to.x - from.x;
    const dy = to.y - from.y;
    const dist = Math.max(Math.hypot(dx, dy), 1);
    const trim = ARG_R + 6;
    const line = svg("line", {
      x1: String(from.x + (dx / dist) * ARG_R),
      y1: String(from.y + (dy / dist) * ARG_R),
      x2: String(to.x - (dx / dist) * trim),
      y2: String(to.y - (dy / dist) * trim),
      class: "attack-edge",
      "marker-end": "url(#attack-arrow)",
    });
    line.append(svgTitle(edge.reason));
    root.append(line);
  }

  for (const node of view.nodes) {
    const pos = positions.get(node.id);
    if (!pos) continue;
    const group = svg("g", {
      class: `graph-node ${node.kind}`,
      "data-node-id": node.id,
      "data-label": node.label,
    });
    group.append(svgTitle(`${node.id} [${node.label}]\n${node.title}`));
    if (node.kind === "objection") {
      const r = ARG_R - 6;
      group.append(svg("rect", {
        x: String(pos.x - r),
        y: String(pos.y - r),
        width: String(r * 2),
        height: String(r * 2),
        transform: `rotate(45 ${pos.x} ${pos.y})`,
        fill: node.color,
        class: "node-shape",
      }));
    } else {
      group.append(svg("circle", {
        cx: String(pos.x),
        cy: String(pos.y),
        r: String(ARG_R),
        fill: node.color,
        class: "node-shape",
      }));
    }
    group.append(svg("text", {
      x: String(pos.x),
      y: String(pos.y + ARG_R + 14),
      "text-anchor": "middle",
      class: "node-label",
    }, [node.id]));
    root.append(group);
  }
  return root;
}

// ---------------------------------------------------------------------------
// Report and critical questions
// ---------------------------------------------------------------------------

function renderReport(current: CaseState): HTMLElement {
  const badges = findingBadges(current.report);
  const section = el("section", { class: "panel report-panel" }, [
    el("h2", {}, ["Findings"]),
  ]);
  if (badges.length === 0) {
    section.append(el("p", { class: "empty" }, ["No arguments instantiated yet."]));
    return section;
  }
  const byStatement = new Map(current.report.findings.map((f) => [f.statement, f]));
  for (const badge of badges) {
    const finding = byStatement.get(badge.statement);
    const item = el("article", { class: "finding", "data-statement": badge.statement }, [
      el("header", {}, [
        el("span", { class: `badge ${badge.badgeClass}`, "data-tier": badge.tier }, [badge.tier]),
        el("span", { class: "finding-statement" }, [badge.statement]),
      ]),
    ]);
    if (finding) {
      const chain = finding.chain
        .map((link) => `${link.arg_id} (${link.scheme_name}) [${link.label}]`)
        .join(" <- ");
      item.append(el("p", { class: "finding-chain" }, [`Support: ${chain}`]));
      if (finding.defeaters.length > 0) {
        const list = el("ul", { class: "defeaters" });
        for (const defeater of finding.defeaters) {
          list.append(el("li", {}, [
            `${defeater.attacker} defeats ${defeater.target} (${defeater.reason}): ${defeater.text}`,
          ]));
        }
        item.append(list);
      }
      item.append(el("p", { class: "finding-open" }, [
        `${finding.open_cq_count} open question${finding.open_cq_count === 1 ? "" : "s"} on the chain`,
      ]));
    }
    section.append(item);
  }
  return section;
}

function renderAnswerForm(row: CqRow, handlers: Handlers): HTMLElement {
  const form = el("form", {
    class: "answer-form",
    "data-arg-id": row.arg_id,
    "data-cq-id": row.cq_id,
  }) as HTMLFormElement;
  const select = el("select", { name: "answer" }, [
    el("option", { value: "" }, ["choose..."]),
    el("option", { value: "favourable" }, ["favourable"]),
    el("option", { value: "unfavourable" }, ["unfavourable"]),
  ]) as HTMLSelectElement;
  const justification = el("input", {
    type: "text",
    name: "justification",
    placeholder: "justification (required)",
  }) as HTMLInputElement;
  const submit = el("button", { type: "submit" }, ["Record answer"]);
  form.append(select, justification, submit);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const check = checkAnswerForm({
      answer: select.value,
      justification: justification.value,
    });
    if (!check.ok || check.answer === undefined) {
      handlers.formError(check.message);
      return;
    }
    handlers.answer(row.arg_id, row.cq_id, check.answer, justification.value);
  });
  return form;
}

function renderCqPanel(current: CaseState, handlers: Handlers): HTMLElement {
  const section = el("section", { class: "panel cq-panel" }, [
    el("h2", {}, ["Critical questions"]),
  ]);
  const rows = cqQueue(current.cqs);
  if (rows.length === 0) {
    section.append(el("p", { class: "empty" }, ["No critical questions: no arguments yet."]));
    return section;
  }
  for (const row of rows) {
    const item = el("article", {
      class: `cq cq-${row.state}`,
      "data-arg-id": row.arg_id,
      "data-cq-id": row.cq_id,
    }, [
      el("header", {}, [
        el("span", { class: "cq-ref" }, [`${row.arg_id} / ${row.cq_id}`]),
        el("span", { class: `cq-kind kind-${row.kind}` }, [row.kind]),
        el("span", { class: `cq-state state-${row.state}` }, [row.state]),
      ]),
      el("p", { class: "cq-text" }, [row.text]),
    ]);
    if (row.state === "open") {
      item.append(renderAnswerForm(row, handlers));
    } else {
      item.append(el("p", { class: "cq-justification" }, [`Basis: ${row.justification}`]));
    }
    section.append(item);
  }
  return section;
}

// ---------------------------------------------------------------------------
// Page scaffolding
// ---------------------------------------------------------------------------

function renderToasts(toasts: Toast[], handlers: Handlers): HTMLElement {
  const region = el("div", { class: "toasts", role: "status" });
  for (const toast of toasts) {
    const node = el("div", { class: `toast toast-${toast.kind}` }, [toast.message]);
    const close = el("button", { class: "toast-close", type: "button" }, ["x"]);
    close.addEventListener("click", () => handlers.dismissToast(toast.id));
    node.append(close);
    region.append(node);
  }
  return region;
}

function renderCaseList(state: AppState, handlers: Handlers): HTMLElement {
  const panel = el("section", { class: "panel case-list" }, [el("h2", {}, ["Cases"])]);
  if (state.cases.length === 0) {
    panel.append(el("p", { class: "empty" }, [
      "No case files found. Start the service with a case directory, or run the bundled demo.",
    ]));
    return panel;
  }
  const list = el("ul");
  for (const caseId of state.cases) {
    const link = el("a", { href: `#/case/${encodeURIComponent(caseId)}` }, [caseId]);
    link.addEventListener("click", () => handlers.selectCase(caseId));
    list.append(el("li", {}, [link]));
  }
  panel.append(list);
  return panel;
}

function renderCaseView(current: CaseState, handlers: Handlers): HTMLElement {
  const flow = buildFlowGraph(current.doc.chain.embedded ?? { transactions: [] }, current.clusters);
  const graphView = argumentGraphView(current.evaluation, argumentsById(current.args));
  const container = el("div", { class: "case-view" });
  container.append(el("header", { class: "case-header" }, [
    el("h1", {}, [current.caseId]),
    el("span", { class: "meta" }, [
      `revision ${current.evaluation.revision}, ${current.evaluation.semantics} semantics`,
    ]),
  ]));
  const flowPanel = el("section", { class: "panel" }, [el("h2", {}, ["Value flow between clusters"])]);
  flowPanel.append(renderFlowGraph(flow));
  if (current.clusters.coinjoin_flagged.length > 0) {
    const list = el("ul", { class: "coinjoin-list" });
    for (const flagged of current.clusters.coinjoin_flagged) {
      list.append(el("li", {}, [`${flagged.txid}: ${flagged.reason}`]));
    }
    flowPanel.append(el("details", {}, [
      el("summary", {}, [`${current.clusters.coinjoin_flagged.length} coinjoin-shaped transaction(s) excluded from clustering`]),
      list,
    ]));
  }
  container.append(flowPanel);

  const argPanel = el("section", { class: "panel" }, [el("h2", {}, ["Argument graph"])]);
  if (graphView.nodes.length === 0) {
    argPanel.append(el("p", { class: "empty" }, ["No arguments instantiated yet."]));
  } else {
    argPanel.append(renderArgumentGraph(graphView));
    argPanel.append(el("p", { class: "legend" }, [
      el("span", { class: "legend-in" }, ["accepted"]),
      " ",
      el("span", { class: "legend-out" }, ["defeated"]),
      " ",
      el("span", { class: "legend-undec" }, ["undecided"]),
      " (diamonds are critical-question objections)",
    ]));
  }
  container.append(argPanel);
  container.append(renderReport(current));
  container.append(renderCqPanel(current, handlers));
  return container;
}

function renderRetry(handlers: Handlers): HTMLElement {
  const panel = el("section", { class: "panel retry" }, [
    el("h2", {}, ["Service unreachable"]),
    el("p", {}, ["The case service did not answer. Check that it is running, then retry."]),
  ]);
  const button = el("button", { type: "button", class: "retry-button" }, ["Retry"]);
  button.addEventListener("click", () => handlers.retry());
  panel.append(button);
  return panel;
}

export function renderApp(root: HTMLElement, state: AppState, handlers: Handlers): void {
  root.replaceChildren();
  root.append(renderToasts(state.toasts, handlers));
  if (state.unreachable) {
    root.append(renderRetry(handlers));
    return;
  }
  if (state.loading) {
    root.append(el("p", { class: "loading" }, ["Loading..."]));
    return;
  }
  if (state.current === null) {
    root.append(renderCaseList(state, handlers));
    return;
  }
  const back = el("a", { href: "#/", class: "back-link" }, ["all cases"]);
  back.addEventListener("click", () => handlers.selectCase(""));
  root.append(el("nav", {}, [back]));
  root.append(renderCaseView(state.current, handlers));
}
