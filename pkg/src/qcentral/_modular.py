"""Modular screening used to pick bases quickly; every pick is re-checked exactly later."""
from __future__ import annotations

PRIME = (1 << 61) - 1
# a fixed "generic" evaluation point for q
Q0 = 1_000_003


def rank_select(candidates, row_fn, target: int | None = None):
    """Greedily keep candidates whose rows (mod PRIME) increase the rank."""
    pivots: dict[int, list[int]] = {}
    order: list[int] = []
    chosen = []
    for cand in candidates:
        row = [x % PRIME for x in row_fn(cand)]
        for col in order:
            c = row[col]
            if c:
                prow = pivots[col]
                row = [(a - c * b) % PRIME for a, b in zip(row, prow)]
        lead = next((k for k, v in enumerate(row) if v), None)
        if lead is None:
            continue
        inv = pow(row[lead], -1, PRIME)
        row = [v * inv % PRIME for v in row]
        pivots[lead] = row
        order.append(lead)
        chosen.append(cand)
        if target is not None and len(chosen) == target:
            break
    return chosen
