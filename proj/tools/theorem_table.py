#!/usr/bin/env python3
"""Writes data/theorem_a1.json: the expected compact hypersurface orbits,
listed family by family from the closed-form statement (not from a scan)."""
import json
import sys

MAX_RANK = 8
rows = []


def add(type_label, rank, form, removed, manifold, family):
    rows.append({"type": type_label, "rank": rank, "real_form": form,
                 "removed": [removed] if removed else [], "manifold": manifold,
                 "family": family})


# SL(2,R) = SU(1,1) on P_1, Borel case
rows.append({"type": "A1", "rank": 1, "real_form": "split(A1)", "removed": [1],
             "manifold": "P_1", "family": "SL(2,R) acting on P_1"})

for n in range(2, MAX_RANK + 1):
    for p in range(1, (n + 1) // 2 + 1):
        q = n + 1 - p
        ks = range(1, n + 1) if p == 1 else (1, n)
        for k in ks:
            fam = "SU(1,n) acting on Gr_k(C^{n+1})" if p == 1 else "SU(p,q) acting on P_{p+q-1}"
            man = f"P_{n}" if k in (1, n) else f"Gr_{k}(C^{n + 1})"
            add(f"A{n}", n, f"su({p},{q})", k, man, fam)

for n in range(2, MAX_RANK + 1):
    add(f"B{n}", n, f"so(1,{2 * n})", n, f"IGr_{n}(C^{2 * n + 1})", "SO(1,2n) acting on IGr_n(C^{2n+1})")

for n in range(2, MAX_RANK + 1):
    for p in range(1, n // 2 + 1):
        add(f"C{n}", n, f"sp({p},{n - p})", 1, f"P_{2 * n - 1}", "Sp(p,q) acting on P_{2(p+q)-1}")

for n in range(4, MAX_RANK + 1):
    add(f"D{n}", n, f"so*({2 * n})", 1, f"Q_{2 * n - 2}", "SO*(2n) acting on Q_{2n-2}")
    if n == 4:
        add("D4", 4, "so*(8)", 3, "Q_6 (triality image)", "SO*(8) = SO(6,2) acting on Q_6")
    for k in (n - 1, n):
        add(f"D{n}", n, f"so(2,{2 * n - 2})", k, f"IGr_{n}(C^{2 * n})^0", "SO(2,2n) acting on IGr_{n+1}(C^{2n+2})^0")

json.dump({"max_rank": MAX_RANK, "hypersurface_orbits": rows}, sys.stdout, indent=1)
sys.stdout.write("\n")
