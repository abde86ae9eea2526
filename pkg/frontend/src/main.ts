// Browser bootstrap: read the service URL from the header bar and mount the
// workbench against it.

import { ApiClient } from "./api.js";
import { buildApp } from "./app.js";

const baseInput = document.getElementById("api-base") as HTMLInputElement | null;
const connectBtn = document.getElementById("connect-btn");
const root = document.getElementById("root");

if (baseInput && connectBtn && root) {
  connectBtn.addEventListener("click", () => {
    buildApp(root, new ApiClient(baseInput.value));
  });
}
