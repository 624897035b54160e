#!/usr/bin/env python3
"""Second implementation of plan canonicalization and digest.

Parses a .plan file with its own reader, fills the documented defaults,
serializes with sorted keys, no whitespace and reals as %.9g, and prints the
SHA-256 hex digest. Its output for the shipped plans is frozen in
tests/test_digest.cpp.

usage: plan_digest.py PLAN...
"""
import hashlib
import json
import sys

EU = ["AT", "BE", "BG", "HR", "CY", "CZ", "DK", "EE", "FI", "FR", "DE", "GR", "HU", "IE",
      "IT", "LV", "LT", "LU", "MT", "NL", "PL", "PT", "RO", "SK", "SI", "ES", "SE"]


def read_plan(path):
    top, blocks, cur = {}, [], None
    with open(path, encoding="utf-8") as f:
        for raw in f:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                cur = {}
                blocks.append(cur)
                continue
            key, value = (s.strip() for s in line.split("=", 1))
            (cur if cur is not None else top)[key] = value
    return top, blocks


def as_list(v):
    return [s.strip() for s in v.split(",") if s.strip()]


def plan_doc(path):
    top, blocks = read_plan(path)
    pools = []
    for b in blocks:
        for t in as_list(b.get("topics", "")):
            if t not in pools:
                pools.append(t)
    topics = as_list(top["topics"]) if "topics" in top else pools
    cohorts = []
    for b in blocks:
        lo, hi = (int(x) for x in b.get("age_range", "18-25").split("-"))
        cohorts.append({
            "label": b["label"],
            "size": int(b.get("size", 30)),
            "age_range": [lo, hi],
            "genders": as_list(b.get("genders", "female, male")),
            "locations": as_list(b["locations"]) if "locations" in b else EU,
            "topics": as_list(b["topics"]) if "topics" in b else topics,
            "sensitive_interest": b.get("sensitive_interest"),
            "engage_probability": float(b.get("engage_probability", 0.8)),
        })
    rule = lambda k, d: top.get("decision_rule." + k, d)
    return {
        "plan_id": top.get("plan_id", "audit"),
        "seed": int(top.get("seed", 0)),
        "case": top.get("case", "minors_profiling"),
        "duration_days": int(top.get("duration_days", 20)),
        "sessions_per_day": int(top.get("sessions_per_day", 1)),
        "session_budget": int(top.get("session_budget", 40)),
        "bootstrap_interactions": int(top.get("bootstrap_interactions", 10)),
        "window_days": int(top.get("window_days", 0)),
        "topics": topics,
        "cohorts": cohorts,
        "decision_rule": {
            "test_method": rule("test_method", "permutation"),
            "alpha": float(rule("alpha", 0.05)),
            "sidedness": rule("sidedness", "one_sided_lower"),
            "n_resamples": int(rule("n_resamples", 10000)),
            "min_impressions_per_group": int(rule("min_impressions_per_group", 100)),
            "variant": rule("variant", "verbatim"),
            "margin": float(rule("margin", 0.05)),
            "plateau_tolerance": float(rule("plateau_tolerance", 0.05)),
        },
    }


def canonical(v):
    if isinstance(v, dict):
        return "{" + ",".join(json.dumps(k, ensure_ascii=False) + ":" + canonical(v[k]) for k in sorted(v)) + "}"
    if isinstance(v, list):
        return "[" + ",".join(canonical(x) for x in v) + "]"
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, float):
        return "%.9g" % v
    raise TypeError(type(v))


if __name__ == "__main__":
    for p in sys.argv[1:]:
        print(p, hashlib.sha256(canonical(plan_doc(p)).encode()).hexdigest())
