/**
 * Browser entry point: mounts the session panel, the coreference browser
 * and the mined-pattern list against a running service.
 */

import { FetchLike, ServiceClient } from "./api";
import { CorefBrowser, MinedPatternsView, SessionPanel } from "./views";

export interface App {
  session: SessionPanel;
  coref: CorefBrowser;
  mined: MinedPatternsView;
}

export function createApp(
  doc: Document,
  root: HTMLElement,
  client: ServiceClient
): App {
  root.textContent = "";
  const sessionHost = doc.createElement("section");
  sessionHost.className = "session-host";
  const corefHost = doc.createElement("section");
  corefHost.className = "coref-host";
  const minedHost = doc.createElement("section");
  minedHost.className = "mined-host";
  root.appendChild(sessionHost);
  root.appendChild(corefHost);
  root.appendChild(minedHost);
  return {
    session: new SessionPanel(doc, sessionHost, client),
    coref: new CorefBrowser(doc, corefHost, client),
    mined: new MinedPatternsView(doc, minedHost, client),
  };
}

declare const window: (Window & { fetch: FetchLike }) | undefined;

if (typeof window !== "undefined" && typeof document !== "undefined") {
  const base =
    new URLSearchParams(window.location?.search ?? "").get("service") ?? "";
  const client = new ServiceClient(base, window.fetch.bind(window));
  const root = document.getElementById("app");
  if (root) {
    const app = createApp(document, root, client);
    void app.session.start("predicate-frequency");
    void app.mined.load();
  }
}
