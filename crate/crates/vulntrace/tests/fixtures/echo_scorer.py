#!/usr/bin/env python3
"""Scores each candidate by the number of word tokens it shares with the query.

The behavior variants used by the tests are chosen by the file name this
script is invoked through: bad_handshake, wrong_id, short_scores, crash.
"""
import json
import os
import re
import sys

MODE = os.path.splitext(os.path.basename(sys.argv[0]))[0]


def words(text):
    return set(re.findall(r"[a-z0-9]+", text.lower().replace("_", " ")))


def main():
    if MODE == "bad_handshake":
        print(json.dumps({"protocol": "something-else", "version": 1}), flush=True)
    else:
        print(json.dumps({"protocol": "vulntrace-scorer", "version": 1}), flush=True)
    for line in sys.stdin:
        if not line.strip():
            continue
        req = json.loads(line)
        if MODE == "crash":
            sys.exit(7)
        q = words(req["query"])
        scores = [float(len(q & words(c))) for c in req["candidates"]]
        if MODE == "short_scores":
            scores = scores[:-1]
        rid = req["id"] + 1 if MODE == "wrong_id" else req["id"]
        print(json.dumps({"id": rid, "scores": scores}), flush=True)


if __name__ == "__main__":
    main()
