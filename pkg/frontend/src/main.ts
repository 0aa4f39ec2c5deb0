import { GatewayClient } from "./api.js";
import { WorkbenchController } from "./controller.js";
import { WorkbenchView } from "./render.js";
import type { ActionHandlers } from "./render.js";

/** Wire a controller and view into `root` against the gateway at `baseUrl`. */
export function mountWorkbench(root: HTMLElement, baseUrl = ""): WorkbenchController {
  const client = new GatewayClient(baseUrl);
  const controller = new WorkbenchController(client);

  const handlers: ActionHandlers = {
    onCreate: (nl) => {
      void controller.create(nl).then(() => {
        const session = controller.snapshot().session;
        if (session !== null) {
          window.location.hash = session.id;
        }
      });
    },
    onTranslate: () => void controller.translate(),
    onApprove: () => void controller.approve(),
    onAdd: (fragment, formulaText) => void controller.add(fragment, formulaText),
    onEdit: (fragmentHash, formulaText) => void controller.edit(fragmentHash, formulaText),
    onDelete: (fragmentHash) => void controller.remove(fragmentHash),
    onSelect: (target, index) => void controller.select(target, index),
  };

  const view = new WorkbenchView(root, handlers);
  controller.onChange(() => view.render(controller.snapshot()));

  // the hash names the session, so a reload or shared link resumes it
  const resumeFromHash = () => {
    const sessionId = window.location.hash.replace(/^#/, "");
    if (sessionId !== "" && sessionId !== controller.snapshot().session?.id) {
      void controller.refresh(sessionId);
    }
  };
  window.addEventListener("hashchange", resumeFromHash);

  view.render(controller.snapshot());
  resumeFromHash();
  return controller;
}

const appRoot = typeof document !== "undefined" ? document.getElementById("app") : null;
if (appRoot !== null) {
  mountWorkbench(appRoot);
}
