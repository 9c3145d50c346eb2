#!/usr/bin/env python3
"""Mock adversarial-example oracle speaking the JSON-lines protocol.

Usage: mock_oracle.py MODE [WITNESS_JSON]

Modes:
  robust    every query answers {"status":"robust"}
  adv       answers {"status":"adv"} with the witness given as argv[2]
  unsound   answers "adv" echoing the query point itself (prediction
            unchanged, so the adapter must reject it)
  timeout   answers {"status":"timeout"}
  sleep     sleeps far past any per-query timeout before answering
  noise     emits a response for an unknown id first, then the real one
"""

import json
import sys
import time


def main():
    mode = sys.argv[1] if len(sys.argv) > 1 else "robust"
    witness = json.loads(sys.argv[2]) if len(sys.argv) > 2 else None
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        req = json.loads(line)
        rid = req["id"]
        if mode == "robust":
            resp = {"id": rid, "status": "robust"}
        elif mode == "adv":
            resp = {"id": rid, "status": "adv", "witness": witness}
        elif mode == "unsound":
            resp = {"id": rid, "status": "adv", "witness": req["v"]}
        elif mode == "timeout":
            resp = {"id": rid, "status": "timeout"}
        elif mode == "sleep":
            time.sleep(3600)
            resp = {"id": rid, "status": "robust"}
        elif mode == "noise":
            print(json.dumps({"id": rid + 1000, "status": "robust"}),
                  flush=True)
            resp = {"id": rid, "status": "robust"}
        else:
            sys.exit(2)
        print(json.dumps(resp), flush=True)
    sys.exit(0)


if __name__ == "__main__":
    main()
