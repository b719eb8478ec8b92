"""Start the HTTP service on a free port and post scenario 2 to it."""

import json
import threading
import urllib.request
from pathlib import Path

from abortd import ontology
from abortd.service import make_server

ROOT = Path(__file__).resolve().parent.parent
server = make_server("127.0.0.1:0", ontology.load())
threading.Thread(target=server.serve_forever, daemon=True).start()
url = f"http://127.0.0.1:{server.server_address[1]}"

body = (ROOT / "scenarios" / "scenario2.json").read_bytes()
req = urllib.request.Request(url + "/abort", data=body, headers={"Content-Type": "application/json"})
with urllib.request.urlopen(req) as resp:
    print(resp.status, json.dumps(json.load(resp), indent=2))

server.shutdown()
