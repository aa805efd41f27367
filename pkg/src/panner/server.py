"""HTTP JSON API around a curation session, plus static files for the UI.

Endpoints (all JSON):

* ``GET  /session``          -- full state summary
* ``GET  /session/next``     -- the pending CategoryPrompt, or ``{"done": true}``
* ``POST /session/decision`` -- body ``{"category", "decision"}``; 409 if the
  category is not the one currently prompted (stale UI)
* ``POST /session/export``   -- ``{"article_ids": [...]}``

Anything else is served from the static directory (the browser frontend).
Decision application is serialized with a lock; the session itself is a
single-writer state machine.
"""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .curation import DECISIONS, CurationError, append_log_decision, write_log_header

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
}


def make_server(session, host="127.0.0.1", port=0, static_dir=None, log_fh=None,
                quiet=True):
    """A ThreadingHTTPServer bound to the session. Caller runs serve_forever."""
    lock = threading.Lock()
    static = Path(static_dir).resolve() if static_dir else None
    if log_fh is not None:
        write_log_header(log_fh, session)

    class Handler(BaseHTTPRequestHandler):

        def log_message(self, fmt, *args):  # noqa: N802
            if not quiet:
                super().log_message(fmt, *args)

        def _json(self, payload, status=200):
            body = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):  # noqa: N802
            if self.path == "/session":
                with lock:
                    self._json(session.state_summary())
            elif self.path == "/session/next":
                with lock:
                    prompt = session.next_prompt()
                    if prompt is None:
                        self._json({
                            "done": True,
                            "queue_length": 0,
                            "visited_count": len(session.visited),
                            "kept_count": len(session.kept_articles),
                            "decision_count": len(session.decisions),
                            "decision_tail": [
                                {"category": c, "decision": d}
                                for c, d in session.decisions[-10:]
                            ],
                        })
                    else:
                        payload = prompt.to_jsonable()
                        payload["done"] = False
                        payload["decision_tail"] = [
                            {"category": c, "decision": d}
                            for c, d in session.decisions[-10:]
                        ]
                        self._json(payload)
            else:
                self._static()

        def do_POST(self):  # noqa: N802
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length) if length else b"{}"
            try:
                body = json.loads(raw or b"{}")
            except json.JSONDecodeError:
                self._json({"error": "invalid JSON body"}, 400)
                return
            if self.path == "/session/decision":
                category = body.get("category")
                decision = body.get("decision")
                if decision not in DECISIONS:
                    self._json({"error": f"unknown decision {decision!r}"}, 400)
                    return
                with lock:
                    try:
                        session.apply_decision(category, decision)
                    except CurationError as exc:
                        self._json({"error": str(exc)}, 409)
                        return
                    if log_fh is not None:
                        append_log_decision(log_fh, category, decision)
                    self._json(session.state_summary())
            elif self.path == "/session/export":
                with lock:
                    self._json({"article_ids": session.export_article_set()})
            else:
                self._json({"error": "not found"}, 404)

        def _static(self):
            name = self.path.lstrip("/") or "index.html"
            candidate = (static / name) if static else None
            if candidate is None or not candidate.is_file() \
                    or static not in candidate.resolve().parents:
                self._json({"error": "not found"}, 404)
                return
            body = candidate.read_bytes()
            self.send_response(200)
            ctype = _CONTENT_TYPES.get(candidate.suffix, "application/octet-stream")
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return ThreadingHTTPServer((host, port), Handler)
