#!/usr/bin/env python3
"""Writes the demo workspace: graded pools, dense/sparse runs, texts, answers,
config points and a price sheet. Deterministic for a given seed."""
import json
import random
import sys

SEED = 20250611
QUERIES = 8
POOL = 30
TOPICS = ["tidal energy storage", "urban tree canopy", "soil carbon accounting", "river sediment transport",
          "coastal flood warning", "alpine snowpack decline", "peatland restoration", "wildfire smoke exposure"]
ASPECTS = ["field measurements", "cost estimates", "policy options", "long-term trends", "modelling results",
           "regional case studies", "monitoring methods", "open questions"]


def dump(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")


def main():
    rng = random.Random(SEED)
    pools, runs, texts, answers = [], [], [], []
    for qi in range(QUERIES):
        q = f"q{qi + 1:02d}"
        topic = TOPICS[qi]
        grades = {}
        for di in range(POOL):
            d = f"{q}-d{di:02d}"
            g = rng.choices([5, 4, 3, 2, 1], weights=[1, 2, 3, 4, 5])[0]
            grades[d] = g
            facet = ASPECTS[di % len(ASPECTS)]
            pools.append({"query_id": q, "doc_id": d, "grade": g, "facet_key": facet})
            texts.append({"doc_id": d, "text": f"Notes on {topic}: {facet}, excerpt {di}. "
                                               f"Relevance band {g} of five for this request."})
        # One near-duplicate pair per query so dedup has work to do.
        dup = f"{q}-d00"
        texts[-POOL]["text"] = f"Notes on {topic}: a detailed summary of {ASPECTS[0]} across sites."
        texts.append({"doc_id": f"{q}-x01", "text": f"Notes on {topic}: a detailed summary of {ASPECTS[0]} across sites!"})
        pools.append({"query_id": q, "doc_id": f"{q}-x01", "grade": grades[dup], "facet_key": ASPECTS[0]})
        grades[f"{q}-x01"] = grades[dup]

        ids = sorted(grades)
        for system, noise in (("dense", 1.2), ("sparse", 1.8)):
            keyed = sorted(ids + [f"{q}-u{system[0]}"], key=lambda d: -(grades.get(d, 1) + rng.gauss(0, noise)))
            for rank, d in enumerate(keyed[:20], 1):
                runs.append({"query_id": q, "doc_id": d, "rank": rank, "score": round(1.0 / rank, 6), "system": system})
        gold = [d for d in ids if grades[d] >= 4][:2]
        answers.append({"query_id": q, "gold_doc_ids": gold, "correct": rng.random() < 0.7})

    dump("pools.jsonl", pools)
    dump("runs.jsonl", runs)
    dump("texts.jsonl", sorted(texts, key=lambda t: t["doc_id"]))
    dump("answers.jsonl", answers)

    points = []
    for model, dim, base_q, base_ms in (("embed-small", 512, 0.52, 180.0), ("embed-large", 1024, 0.58, 240.0)):
        for reranker, rr_q, rr_ms in (("none", 0.0, 0.0), ("rerank-lite", 0.06, 120.0), ("rerank-pro", 0.10, 260.0)):
            for k in (10, 30, 50):
                lift = 0.02 * (k // 10 - 1) if reranker != "none" else 0.0
                q10 = round(base_q + rr_q + lift, 4)
                q30 = round(min(0.99, q10 + 0.05), 4)
                point = {"config_id": f"{model}-{reranker}-k{k}", "model": model, "dimension": dim,
                         "reranker": reranker, "k": k, "ann": "hnsw",
                         "latency_p50": round(base_ms + rr_ms * k / 30, 1),
                         "latency_p95": round(1.6 * (base_ms + rr_ms * k / 30), 1),
                         "quality": {"N-Recall4+@10": round(min(0.99, q10 + 0.12), 4), "RA-nWG@10": q10,
                                     "N-Recall4+@30": round(min(0.99, q30 + 0.1), 4), "RA-nWG@30": q30}}
                if reranker == "none":
                    point["cost"] = "0.40"
                points.append(point)
    dump("config_points.jsonl", points)
    with open("prices.ini", "w") as f:
        f.write("# USD per 1k reranker tokens / per 1M generator input tokens\n"
                "[rerank]\nrerank-lite = 0.001\nrerank-pro = 0.002\n\n"
                "[generator]\ngen-standard = 2.50\n")

    config = {
        "inputs": {"pools": "pools.jsonl", "runs": "runs.jsonl", "texts": "texts.jsonl", "answers": "answers.jsonl",
                   "config_points": "config_points.jsonl", "price_sheet": "prices.ini", "bundles": "bundles.jsonl"},
        "seed": 7,
        "ks": [10, 20],
        "dedup": {"jaccard": 0.8},
        "refine": {"enabled": True, "judge": "simulated", "noise_scale": 0.3, "ranker": {"top_n": 10}},
        "clq": {"slo_ms": 500, "tokens_per_candidate": 300},
        "diagnose": {"enabled": True, "provider": "hashing",
                     "ablations": ["base", "hard_name_mask", "strip_diacritics", "initials_form"]},
    }
    with open("config.json", "w") as f:
        json.dump(config, f, indent=2)
        f.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
