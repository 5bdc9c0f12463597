// Browser entry point.  The service base url comes from, in order: the
// ?api= query parameter, the saved setting, the page origin.

import { mountApp } from "./controller.js";

const STORAGE_KEY = "pinpoint.baseUrl";

function resolveBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  if (fromQuery) return fromQuery;
  try {
    const saved = window.localStorage.getItem(STORAGE_KEY);
    if (saved) return saved;
  } catch {
    // storage can be unavailable (file:// or privacy mode); fall through
  }
  return window.location.origin;
}

const root = document.getElementById("app");
if (root !== null) {
  mountApp(root, {
    baseUrl: resolveBaseUrl(),
    onBaseUrlSaved: (url) => {
      try {
        window.localStorage.setItem(STORAGE_KEY, url);
      } catch {
        // best effort only
      }
    },
  });
}
