/**
 * Display-side model of edge notation: a nested tree of labeled nodes.
 * The service owns validation; this parser only mirrors well-formed
 * notation coming back from it.
 */

export interface TreeNode {
  notation: string;
  label: string;
  typeCode: string | null;
  roles: string | null;
  namespace: string | null;
  children: TreeNode[];
}

function tokenize(text: string): string[] {
  const tokens: string[] = [];
  let word = "";
  for (const ch of text) {
    if (ch === "(" || ch === ")") {
      if (word) {
        tokens.push(word);
        word = "";
      }
      tokens.push(ch);
    } else if (/\s/.test(ch)) {
      if (word) {
        tokens.push(word);
        word = "";
      }
    } else {
      word += ch;
    }
  }
  if (word) tokens.push(word);
  return tokens;
}

function atomNode(token: string): TreeNode {
  const parts = token.split("/");
  const label = parts[0];
  let typeCode: string | null = null;
  let roles: string | null = null;
  let namespace: string | null = null;
  if (parts.length > 1) {
    const dot = parts[1].indexOf(".");
    typeCode = dot < 0 ? parts[1] : parts[1].slice(0, dot);
    roles = dot < 0 ? null : parts[1].slice(dot + 1);
  }
  if (parts.length > 2) namespace = parts[2];
  return { notation: token, label, typeCode, roles, namespace, children: [] };
}

export function parseEdge(text: string): TreeNode {
  const tokens = tokenize(text.trim());
  let position = 0;

  function parseTerm(): TreeNode {
    const token = tokens[position];
    if (token === undefined) throw new Error("unexpected end of notation");
    if (token === ")") throw new Error(`unexpected ')' at ${position}`);
    if (token !== "(") {
      position += 1;
      return atomNode(token);
    }
    position += 1; // consume '('
    const children: TreeNode[] = [];
    while (tokens[position] !== ")") {
      if (tokens[position] === undefined) {
        throw new Error("unbalanced '('");
      }
      children.push(parseTerm());
    }
    position += 1; // consume ')'
    if (children.length === 0) throw new Error("empty edge");
    if (children.length === 1) return children[0];
    const connector = children[0];
    return {
      notation: "(" + children.map((c) => c.notation).join(" ") + ")",
      label: connector.label,
      typeCode: connector.typeCode,
      roles: connector.roles,
      namespace: null,
      children,
    };
  }

  const node = parseTerm();
  if (position !== tokens.length) throw new Error("trailing notation");
  return node;
}
