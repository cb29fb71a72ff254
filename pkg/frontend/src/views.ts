/**
 * DOM views: the edge tree, the learning session panel, the coreference
 * browser and the mined-pattern list.  Every displayed pattern and match
 * comes from a service response; the views never match anything locally.
 */

import { ServiceClient, ServiceError, SessionState } from "./api";
import { parseEdge, TreeNode } from "./edgeTree";

export const COLLAPSE_DEPTH = 3;

export interface TreeOptions {
  collapseDepth?: number;
  onSelect?: (notation: string) => void;
}

export function renderEdgeTree(
  doc: Document,
  notation: string,
  options: TreeOptions = {}
): HTMLElement {
  const collapseDepth = options.collapseDepth ?? COLLAPSE_DEPTH;
  const root = parseEdge(notation);

  function renderNode(node: TreeNode, depth: number): HTMLElement {
    const li = doc.createElement("li");
    li.className = "node";
    li.dataset.notation = node.notation;
    const label = doc.createElement("span");
    label.className = "node-label";
    label.textContent = node.label;
    label.addEventListener("click", (event) => {
      event.stopPropagation();
      const previous = li.ownerDocument.querySelector(".node-label.selected");
      if (previous) previous.classList.remove("selected");
      label.classList.add("selected");
      options.onSelect?.(node.notation);
    });
    li.appendChild(label);
    if (node.typeCode) {
      const badge = doc.createElement("span");
      badge.className = "type-badge";
      badge.textContent = node.typeCode;
      li.appendChild(badge);
    }
    if (node.roles) {
      const badge = doc.createElement("span");
      badge.className = "role-badge";
      badge.textContent = node.roles;
      li.appendChild(badge);
    }
    if (node.children.length > 0) {
      const children = doc.createElement("ul");
      children.className = "children";
      if (depth + 1 > collapseDepth) children.classList.add("collapsed");
      for (const child of node.children) {
        children.appendChild(renderNode(child, depth + 1));
      }
      li.appendChild(children);
    }
    return li;
  }

  const tree = doc.createElement("ul");
  tree.className = "edge-tree";
  tree.appendChild(renderNode(root, 0));
  return tree;
}

export class SessionPanel {
  state: SessionState | null = null;
  selected: string | null = null;
  lastAction: Promise<void> = Promise.resolve();

  constructor(
    private doc: Document,
    private container: HTMLElement,
    private client: ServiceClient
  ) {}

  start(criterion: string): Promise<void> {
    this.lastAction = (async () => {
      this.state = await this.client.createSession(criterion);
      this.render();
    })();
    return this.lastAction;
  }

  private showError(message: string) {
    const banner = this.container.querySelector(".error-banner");
    if (banner) {
      banner.textContent = message;
      (banner as HTMLElement).removeAttribute("hidden");
    }
  }

  render() {
    const state = this.state;
    this.container.textContent = "";
    this.selected = null;
    if (!state) return;
    const doc = this.doc;

    const banner = doc.createElement("div");
    banner.className = "error-banner";
    banner.setAttribute("hidden", "hidden");
    this.container.appendChild(banner);

    const source = doc.createElement("div");
    source.className = "source-text";
    source.textContent = state.candidate_text;
    this.container.appendChild(source);

    const candidate = doc.createElement("div");
    candidate.className = "candidate";
    candidate.appendChild(
      renderEdgeTree(doc, state.candidate, {
        onSelect: (notation) => {
          this.selected = notation;
        },
      })
    );
    this.container.appendChild(candidate);

    const controls = doc.createElement("div");
    controls.className = "assign-controls";
    const nameInput = doc.createElement("input");
    nameInput.className = "variable-name";
    const assignButton = doc.createElement("button");
    assignButton.className = "assign-button";
    assignButton.textContent = "assign";
    assignButton.addEventListener("click", () => {
      this.lastAction = this.assignSelected(nameInput.value);
    });
    controls.appendChild(nameInput);
    controls.appendChild(assignButton);
    this.container.appendChild(controls);

    const pattern = doc.createElement("pre");
    pattern.className = "pattern-text";
    pattern.textContent = state.pattern;
    this.container.appendChild(pattern);

    const queue = doc.createElement("ul");
    queue.className = "match-queue";
    for (const match of state.matches) {
      const item = doc.createElement("li");
      item.className = "match";
      item.dataset.edge = match.edge;
      item.dataset.status = match.status;
      const text = doc.createElement("span");
      text.className = "match-text";
      text.textContent = match.text || match.edge;
      item.appendChild(text);
      const accept = doc.createElement("button");
      accept.className = "accept-button";
      accept.textContent = "accept";
      accept.addEventListener("click", () => {
        this.lastAction = this.review(match.edge, "accept");
      });
      const reject = doc.createElement("button");
      reject.className = "reject-button";
      reject.textContent = "reject";
      reject.addEventListener("click", () => {
        this.lastAction = this.review(match.edge, "reject");
      });
      item.appendChild(accept);
      item.appendChild(reject);
      queue.appendChild(item);
    }
    this.container.appendChild(queue);

    const status = doc.createElement("div");
    status.className = "session-status";
    const pending = state.matches.filter((m) => m.status === "pending");
    status.textContent = state.matches.length === 0
      ? "no matches"
      : pending.length === 0
        ? "confirmed"
        : `${pending.length} matches to review`;
    this.container.appendChild(status);
  }

  async assignSelected(variable: string): Promise<void> {
    if (!this.state) return;
    if (!this.selected) {
      this.showError("select a sub-edge first");
      return;
    }
    if (this.selected === this.state.candidate) {
      this.showError("assigning the whole edge makes a degenerate pattern");
    }
    try {
      this.state = await this.client.assign(
        this.state.id,
        variable,
        this.selected
      );
      this.render();
    } catch (error) {
      if (error instanceof ServiceError) {
        this.showError(error.message);
      } else {
        throw error;
      }
    }
  }

  async review(edge: string, verdict: "accept" | "reject"): Promise<void> {
    if (!this.state) return;
    try {
      this.state = await this.client.feedback(this.state.id, edge, verdict);
      this.render();
    } catch (error) {
      if (error instanceof ServiceError) {
        this.showError(error.message);
      } else {
        throw error;
      }
    }
  }

  displayedPattern(): string {
    return this.container.querySelector(".pattern-text")?.textContent ?? "";
  }

  queuedEdges(): string[] {
    return Array.from(this.container.querySelectorAll(".match")).map(
      (el) => (el as HTMLElement).dataset.edge ?? ""
    );
  }
}

export class CorefBrowser {
  constructor(
    private doc: Document,
    private container: HTMLElement,
    private client: ServiceClient
  ) {}

  async load(seed: string): Promise<void> {
    const report = await this.client.coref(seed);
    this.container.textContent = "";
    const heading = this.doc.createElement("div");
    heading.className = "coref-seed";
    heading.textContent = `${report.seed}${
      report.assigned ? ` -> ${report.assigned}` : " (unassigned)"
    }`;
    this.container.appendChild(heading);
    const list = this.doc.createElement("ul");
    list.className = "coref-sets";
    for (const set of report.sets) {
      const item = this.doc.createElement("li");
      item.className = "coref-set";
      item.dataset.label = set.label;
      item.textContent = `p=${set.p.toFixed(3)} ${set.members.join(", ")}`;
      list.appendChild(item);
    }
    this.container.appendChild(list);
  }
}

export class MinedPatternsView {
  constructor(
    private doc: Document,
    private container: HTMLElement,
    private client: ServiceClient
  ) {}

  async load(): Promise<void> {
    const payload = await this.client.minedPatterns();
    this.container.textContent = "";
    const list = this.doc.createElement("ol");
    list.className = "mined-patterns";
    for (const entry of payload.patterns) {
      const item = this.doc.createElement("li");
      item.dataset.pattern = entry.pattern;
      item.textContent = `${entry.count}× ${entry.pattern}`;
      list.appendChild(item);
    }
    this.container.appendChild(list);
  }
}
