/** Browser entry point: mount the app and keep the URL shareable. */

import { ApiClient } from "./api.js";
import { createApp } from "./app.js";

const root = document.querySelector<HTMLElement>("#app");
if (root === null) {
  throw new Error("missing #app mount point");
}

createApp(root, new ApiClient(""), {
  initialQuery: window.location.search,
  onUrlChange: (query) => {
    const url = query === "" ? window.location.pathname : `?${query}`;
    window.history.replaceState(null, "", url);
  },
});
