/** Browser entry point: mount the workbench against the same-origin service. */

import { WorkbenchApp } from "./app";

const root = document.getElementById("workbench");
if (root) {
  const app = new WorkbenchApp(root);
  void app.query.refresh();
}
