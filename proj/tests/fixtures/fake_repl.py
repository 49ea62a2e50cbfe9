#!/usr/bin/env python3
"""Stand-in for a Lean REPL speaking the line-JSON check protocol.

Sources containing "HANG" never get an answer, "EXIT" ends the process,
"BAD" fails with a diagnostic; anything else passes.
"""
import json
import sys
import time

for line in sys.stdin:
    req = json.loads(line)
    src = req.get("source", "")
    if "EXIT" in src:
        sys.exit(0)
    if "HANG" in src:
        time.sleep(60)
    ok = "BAD" not in src
    diags = [] if ok else ["<input>:2:0: error: unexpected token"]
    sys.stdout.write(json.dumps({"id": req["id"], "ok": ok, "diagnostics": diags}) + "\n")
    sys.stdout.flush()
