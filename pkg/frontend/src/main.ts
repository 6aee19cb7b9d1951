// Page wiring: #/session/<id> renders a live diagnosis session,
// #/report/<id> renders a check job, the default view lists the workspace.

import { JobDoc, SessionApi } from "./api.js";
import { SessionController } from "./session.js";
import { renderReport, renderSession } from "./view.js";

const POLL_MS = 1000;

export async function mountSession(api: SessionApi, host: HTMLElement, id: string): Promise<SessionController> {
  const controller = new SessionController(api, id);
  const redraw = () => {
    host.replaceChildren(renderSession(controller.current(), (v) => void controller.answer(v)));
  };
  controller.onChange(redraw);
  await controller.refresh();
  const tick = async () => {
    const st = controller.current();
    if (st.phase === "done" || st.phase === "error") return;
    if (st.phase === "loading") await controller.refresh();
    setTimeout(tick, POLL_MS);
  };
  setTimeout(tick, POLL_MS);
  return controller;
}

export async function mountReport(api: SessionApi, host: HTMLElement, id: string): Promise<void> {
  const draw = (job: JobDoc) => host.replaceChildren(renderReport(job));
  let job = await api.getJob(id);
  draw(job);
  while (job.status !== "done" && job.status !== "error") {
    await new Promise((r) => setTimeout(r, POLL_MS));
    job = await api.getJob(id);
    draw(job);
  }
}

async function mountIndex(api: SessionApi, host: HTMLElement): Promise<void> {
  const listing = await api.listWorkspace();
  host.replaceChildren();
  const h = document.createElement("h2");
  h.textContent = "Workspace";
  host.appendChild(h);
  for (const [section, names] of Object.entries(listing)) {
    const title = document.createElement("h3");
    title.textContent = section;
    host.appendChild(title);
    const ul = document.createElement("ul");
    for (const name of names) {
      const li = document.createElement("li");
      if (section === "sessions") {
        const a = document.createElement("a");
        a.href = `#/session/${name}`;
        a.textContent = name;
        li.appendChild(a);
      } else if (section === "jobs") {
        const a = document.createElement("a");
        a.href = `#/report/${name}`;
        a.textContent = name;
        li.appendChild(a);
      } else {
        li.textContent = name;
      }
      ul.appendChild(li);
    }
    host.appendChild(ul);
  }
}

export function route(api: SessionApi, host: HTMLElement): void {
  const go = () => {
    const hash = window.location.hash;
    const session = hash.match(/^#\/session\/(.+)$/);
    const report = hash.match(/^#\/report\/(.+)$/);
    if (session) void mountSession(api, host, session[1]);
    else if (report) void mountReport(api, host, report[1]);
    else void mountIndex(api, host);
  };
  window.addEventListener("hashchange", go);
  go();
}

declare global {
  interface Window {
    declogMount?: () => void;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  window.declogMount = () => {
    const host = document.getElementById("app");
    if (host) route(new SessionApi(""), host);
  };
}
