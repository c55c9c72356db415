/** A tiny DOM-equivalent view tree. Views are pure functions producing
 * VNodes; the browser bootstrap mounts them, tests assert on them. */

export interface VNode {
  tag: string;
  attrs: Record<string, string | number | boolean>;
  children: (VNode | string)[];
}

export function h(
  tag: string,
  attrs: Record<string, string | number | boolean> = {},
  ...children: (VNode | string | null | undefined | false)[]
): VNode {
  return {
    tag,
    attrs,
    children: children.filter((c): c is VNode | string => c !== null && c !== undefined && c !== false),
  };
}

const SVG_TAGS = new Set([
  "svg", "g", "rect", "circle", "line", "path", "text", "polyline", "title",
]);

export function mount(node: VNode | string, doc: Document = document): Node {
  if (typeof node === "string") return doc.createTextNode(node);
  const el = SVG_TAGS.has(node.tag)
    ? doc.createElementNS("http://www.w3.org/2000/svg", node.tag)
    : doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    if (value === false) continue;
    el.setAttribute(key, String(value === true ? "" : value));
  }
  for (const child of node.children) el.appendChild(mount(child, doc));
  return el;
}

/** Depth-first walk collecting nodes matching a predicate. */
export function collect(node: VNode, match: (n: VNode) => boolean, out: VNode[] = []): VNode[] {
  if (match(node)) out.push(node);
  for (const child of node.children) {
    if (typeof child !== "string") collect(child, match, out);
  }
  return out;
}

/** Account ids rendered as selected, per view container. */
export function selectedIdsByView(root: VNode): Record<string, Set<string>> {
  const out: Record<string, Set<string>> = {};
  for (const view of collect(root, (n) => typeof n.attrs["data-view"] === "string")) {
    const name = String(view.attrs["data-view"]);
    const ids = new Set<string>();
    for (const node of collect(view, (n) => n.attrs["data-selected"] === true)) {
      if (typeof node.attrs["data-account"] === "string") ids.add(String(node.attrs["data-account"]));
    }
    out[name] = ids;
  }
  return out;
}

export function accountIdsByView(root: VNode): Record<string, Set<string>> {
  const out: Record<string, Set<string>> = {};
  for (const view of collect(root, (n) => typeof n.attrs["data-view"] === "string")) {
    const name = String(view.attrs["data-view"]);
    const ids = new Set<string>();
    for (const node of collect(view, (n) => typeof n.attrs["data-account"] === "string")) {
      ids.add(String(node.attrs["data-account"]));
    }
    out[name] = ids;
  }
  return out;
}
