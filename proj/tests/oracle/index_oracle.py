#!/usr/bin/env python3
"""Reference BM25 / query-likelihood / smoothed-LM values on toy1.

Inputs are fixed here and repeated verbatim in the C++ test; outputs are
frozen into expected/index_expected.json.
"""

import json
import math
import re
import sys
from pathlib import Path

K1, B = 1.2, 0.75


def tok(text):
    return [w.lower() for w in re.findall(r"[0-9A-Za-z]+", text)]


def tag_tokens(tag):
    parts = tok(tag)
    return parts if len(parts) <= 1 else ["-".join(parts)] + parts


def load_docs(path):
    docs = {}
    for line in path.read_text().splitlines():
        if not line:
            continue
        j = json.loads(line)
        tokens = tok(j.get("text", ""))
        for t in j.get("tags", []):
            tokens += tag_tokens(t)
        docs[j["id"]] = {"city": j["city"], "tokens": tokens}
    return docs


def main():
    root = Path(__file__).resolve().parent.parent / "fixtures"
    docs = load_docs(root / "toy1" / "pois.jsonl")

    n = len(docs)
    clen = sum(len(d["tokens"]) for d in docs.values())
    avgdl = clen / n
    ctf, dfs = {}, {}
    for d in docs.values():
        for t in d["tokens"]:
            ctf[t] = ctf.get(t, 0) + 1
        for t in set(d["tokens"]):
            dfs[t] = dfs.get(t, 0) + 1

    def bm25(query, city):
        scored = []
        for did in sorted(docs):
            if docs[did]["city"] != city:
                continue
            dl = len(docs[did]["tokens"])
            s = 0.0
            for t, qw in query.items():
                tf = docs[did]["tokens"].count(t)
                if tf == 0:
                    continue
                idf = math.log(1.0 + (n - dfs[t] + 0.5) / (dfs[t] + 0.5))
                s += qw * idf * tf * (K1 + 1) / (tf + K1 * (1 - B + B * dl / avgdl))
            if s > 0:
                scored.append((did, s))
        scored.sort(key=lambda x: (-x[1], x[0]))
        return scored

    def kl(theta, city, mu):
        scored = []
        for did in sorted(docs):
            if docs[did]["city"] != city:
                continue
            dl = len(docs[did]["tokens"])
            s = 0.0
            for t, w in theta.items():
                p = (docs[did]["tokens"].count(t) + mu * ctf.get(t, 0) / clen) / (dl + mu)
                if p > 0:
                    s += w * math.log(p)
            scored.append((did, s))
        scored.sort(key=lambda x: (-x[1], x[0]))
        return scored

    def lm(term, did, mu):
        dl = len(docs[did]["tokens"])
        return (docs[did]["tokens"].count(term) + mu * ctf.get(term, 0) / clen) / (dl + mu)

    out = {
        "collection_len": clen,
        "avg_doc_len": avgdl,
        # weighted two-term query, dublin only
        "bm25": bm25({"ale": 0.7, "stout": 0.3}, "dublin"),
        # uniform theta over two terms, dublin, mu=1000
        "kl_uniform": kl({"pub": 0.5, "museum": 0.5}, "dublin", 1000.0),
        # skewed theta, cork, smaller mu
        "kl_skewed": kl({"ale": 0.9, "paint": 0.1}, "cork", 50.0),
        "lm_prob": {
            "ale_c1_mu0": lm("ale", "c1", 0.0),
            "ale_c1_mu100": lm("ale", "c1", 100.0),
            "paint_c2_mu100": lm("paint", "c2", 100.0),
            "museum_d3_mu1000": lm("museum", "d3", 1000.0),
        },
    }
    dest = root / "expected" / "index_expected.json"
    dest.write_text(json.dumps(out, indent=1, sort_keys=True))
    print(f"wrote {dest}")


if __name__ == "__main__":
    sys.exit(main())
