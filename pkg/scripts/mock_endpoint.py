"""Minimal SPARQL protocol endpoint for end-to-end driving.

Serves a fixed actor table as results JSON, honouring the trailing
LIMIT/OFFSET window of each paged query, for both GET and POST.
"""
import json
import re
import sys
from http.server import BaseHTTPRequestHandler, HTTPServer
from urllib.parse import parse_qs, urlparse

VARS = ["actor", "movie_count", "movie", "award"]
ROWS = []
for i in range(12):
    row = {
        "actor": {"type": "uri", "value": f"http://x/actor{i}"},
        "movie_count": {
            "type": "literal",
            "value": str(20 + i),
            "datatype": "http://www.w3.org/2001/XMLSchema#integer",
        },
        "movie": {"type": "uri", "value": f"http://x/movie{i}"},
    }
    if i % 3:
        row["award"] = {"type": "uri", "value": f"http://x/award{i % 4}"}
    ROWS.append(row)


class Handler(BaseHTTPRequestHandler):
    def _answer(self, query):
        window = re.search(r"LIMIT (\d+) OFFSET (\d+)\s*$", query)
        rows = ROWS
        if window:
            limit, offset = int(window.group(1)), int(window.group(2))
            rows = ROWS[offset : offset + limit]
        body = json.dumps(
            {"head": {"vars": VARS}, "results": {"bindings": rows}}
        ).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/sparql-results+json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        params = parse_qs(urlparse(self.path).query)
        self._answer(params.get("query", [""])[0])

    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        params = parse_qs(self.rfile.read(length).decode())
        self._answer(params.get("query", [""])[0])

    def log_message(self, *args):
        print(self.command, file=sys.stderr)


HTTPServer(("127.0.0.1", 8765), Handler).serve_forever()
