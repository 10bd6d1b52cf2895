#!/usr/bin/env python3
"""Frozen 20-piece table and its group statistics, computed with numpy/scipy.

Writes stats_corpus.tsv (id, group, focus_k3, connection) and
stats_expected.tsv (name, value). Run from this directory.
"""
import numpy as np
from scipy import stats

rng = np.random.default_rng(20240611)
rows = []
for i in range(10):
    rows.append((f"a{i:02d}", "A", rng.uniform(0.3, 0.8), rng.normal(2.2, 0.3)))
for i in range(10):
    rows.append((f"b{i:02d}", "B", rng.uniform(0.5, 1.0), abs(rng.normal(1.2, 0.8))))
rows = [(i, g, float(f"{f:.6f}"), float(f"{c:.6f}")) for i, g, f, c in rows]

with open("stats_corpus.tsv", "w") as out:
    out.write("id\tgroup\tfocus_k3\tconnection\n")
    for r in rows:
        out.write(f"{r[0]}\t{r[1]}\t{r[2]!r}\t{r[3]!r}\n")


def cohen(a, b):
    a, b = np.asarray(a), np.asarray(b)
    n1, n2 = len(a), len(b)
    pooled = np.sqrt(((n1 - 1) * a.var(ddof=1) + (n2 - 1) * b.var(ddof=1)) / (n1 + n2 - 2))
    return (a.mean() - b.mean()) / pooled


col = {g: {m: [r[k] for r in rows if r[1] == g] for m, k in (("focus_k3", 2), ("connection", 3))} for g in "AB"}
expected = {}
for g in "AB":
    for m in ("focus_k3", "connection"):
        v = np.asarray(col[g][m])
        expected[f"{g}.{m}.mean"] = v.mean()
        expected[f"{g}.{m}.sd"] = v.std(ddof=1)
        expected[f"{g}.{m}.median"] = np.median(v)
    expected[f"{g}.r"] = stats.pearsonr(col[g]["focus_k3"], col[g]["connection"])[0]
for m in ("focus_k3", "connection"):
    expected[f"d.{m}"] = cohen(col["A"][m], col["B"][m])

fm = np.median([r[2] for r in rows])
cm = np.median([r[3] for r in rows])
expected["median.focus_k3"] = fm
expected["median.connection"] = cm
labels = {"chromatic exploration": 0, "textural diatonicism": 0, "systematic diatonicism": 0, "edge of tonality": 0}
for g in "AB":
    counts = dict.fromkeys(labels, 0)
    for r in rows:
        if r[1] != g:
            continue
        hi_c, hi_f = r[3] >= cm, r[2] >= fm
        lab = ("systematic diatonicism" if hi_f else "chromatic exploration") if hi_c else (
            "textural diatonicism" if hi_f else "edge of tonality")
        counts[lab] += 1
    for lab, n in counts.items():
        expected[f"{g}.count.{lab}"] = n

with open("stats_expected.tsv", "w") as out:
    out.write("name\tvalue\n")
    for k, v in expected.items():
        out.write(f"{k}\t{float(v)!r}\n")
