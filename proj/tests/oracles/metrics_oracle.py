#!/usr/bin/env python3
"""Reference values for the scalar metric building blocks.

Writes fixtures/metric_oracles.json. Each section is computed with numpy or
plain Python set arithmetic.
"""
import json
import math
import re
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "fixtures" / "metric_oracles.json"


def normalize(s):
    s = s.replace("‘", "'").replace("’", "'")
    s = "".join(c.lower() if c.isascii() else c for c in s)
    return re.sub(r"\s+", " ", s).strip()


def grams(s, n):
    s = normalize(s)
    return {s} if len(s) < n else {s[i:i + n] for i in range(len(s) - n + 1)}


def jaccard(a, b, n=3):
    ga, gb = grams(a, n), grams(b, n)
    return len(ga & gb) / len(ga | gb)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def main():
    rng = np.random.default_rng(7)
    out = {}

    pairs = [
        ("how to make tea", "how to brew tea"),
        ("How  to make TEA ", "how to make tea"),
        ("abc", "abd"),
        ("ab", "ab"),
        ("ab", "abc"),
        ("kill a python process", "terminate a python process"),
        ("café au lait", "cafe au lait"),
        ("don’t stop", "don't stop"),
    ]
    out["jaccard"] = [dict(a=a, b=b, n=3, value=jaccard(a, b)) for a, b in pairs]
    out["jaccard"].append(dict(a="how to make tea", b="how to brew tea", n=2,
                               value=jaccard("how to make tea", "how to brew tea", 2)))

    samples = [list(range(1, 10)), [0.5, 0.1, 0.9, 0.3], [1.0, 1.0, 1.0], list(rng.uniform(size=17))]
    out["tertiles"] = [dict(values=[float(x) for x in v],
                            t1=float(np.quantile(v, 1 / 3)), t2=float(np.quantile(v, 2 / 3))) for v in samples]

    out["normalize"] = [
        dict(raw=[2.0, 3.0, 4.0, 8.0], norm=[0.0, 1 / 6, 1 / 3, 1.0]),
        dict(raw=[0.0, 5.0, 10.0], norm=[0.0, 0.5, 1.0]),
        dict(raw=[3.5], norm=[0.0]),
        dict(raw=[2.0, 2.0, 2.0], norm=[0.0, 0.0, 0.0]),
    ]

    # 3-token vs 5-token drift: only the first three positions align.
    a = rng.normal(size=(3, 4))
    r = rng.normal(size=(5, 4))
    d = [1.0 - float(np.dot(unit(a[i]), unit(r[i]))) for i in range(3)]
    pa = rng.uniform(0.05, 0.95, size=3)
    pr = rng.uniform(0.05, 0.95, size=5)
    out["drift_3v5"] = dict(
        a=a.tolist(), r=r.tolist(), pa=pa.tolist(), pr=pr.tolist(),
        drift=float(np.mean(np.clip(d, 0.0, 1.0))), drift_raw=float(np.mean(d)),
        prob_shift=float(np.mean(np.abs(pa - pr[:3]))),
        ppl_a=math.exp(-float(np.mean(np.log(pa)))), ppl_r=math.exp(-float(np.mean(np.log(pr)))),
    )

    # Token manifold score, K = 3 over 6 vectors.
    v = rng.normal(size=(6, 5))
    u = np.array([unit(x) for x in v])
    sims = u @ u.T
    ci_tok = []
    for i in range(6):
        others = sorted(((-sims[i, j], j) for j in range(6) if j != i))
        ci_tok.append(float(np.mean([-s for s, _ in others[:3]])))
    out["ci_tok"] = dict(vectors=v.tolist(), K=3, ci_tok=ci_tok)

    # Similarity bands of width 0.1 over 40 (prompt-level similarity, CI) points.
    sim = rng.uniform(0.55, 0.999, size=40)
    ci = rng.uniform(0.0, 1.0, size=40)
    bands = []
    for b in range(5):
        lo, hi = 1.0 - (b + 1) * 0.1, 1.0 - b * 0.1
        mask = (sim >= lo) & ((sim <= hi) if b == 0 else (sim < hi))
        vals = ci[mask]
        row = dict(lo=lo, count=int(mask.sum()))
        if mask.any():
            row.update(min=float(vals.min()), q1=float(np.quantile(vals, 0.25)), median=float(np.median(vals)),
                       q3=float(np.quantile(vals, 0.75)), max=float(vals.max()))
        bands.append(row)
    while bands and bands[-1]["count"] == 0:
        bands.pop()
    out["bands"] = dict(sim=sim.tolist(), ci=ci.tolist(), width=0.1, rows=bands)

    # Summary statistics over a random CI set.
    cis = rng.uniform(size=25)
    out["summary"] = dict(ci=cis.tolist(), mean=float(cis.mean()), cd=float(cis.std()),
                          cr={str(t): float(np.mean(cis >= t)) for t in (0.25, 0.5, 0.75)})

    with open(OUT, "w") as f:
        json.dump(out, f, indent=1, ensure_ascii=False)
        f.write("\n")


if __name__ == "__main__":
    main()
