"""Timing of the exact pipeline and the floating-point rank baseline.

The baseline evaluates the Gram matrix of *all* words of a weight at a few
floating values of q, rounds every entry to ``precision`` significant
digits (the working precision of the old computation) and counts singular
values above ``max(sigma) * n * 10**-precision``.  The largest count over the
samples is its rank.  The exact pipeline's dimension does not depend on any
of these knobs.
"""
from __future__ import annotations

import itertools
import json
import platform
import time

import numpy as np

from .cartan import CartanType, build_root_data, kostant_count
from .central import assemble_central, build_blocks, required_weights
from .rep import vector_rep, verify_central
from .uqalg import Convention, _form_table, _word_pair_laurent, words_of_weight

__all__ = ["time_pipeline", "legacy_float_rank", "report_markdown", "DEFAULT_SAMPLES"]

DEFAULT_SAMPLES = (1.1, 1.3, 1.7, 2.3, 3.1)


def time_pipeline(t: CartanType, c: Convention = Convention(), verify_sites: int = 1, jobs: int = 1) -> dict:
    """Measured wall-clock seconds per stage; never an estimate."""
    rd = build_root_data(t)
    rep = vector_rep(t)
    t0 = time.perf_counter()
    weights = required_weights(rd, rep)
    blocks = build_blocks(rd, weights, c, jobs)
    t1 = time.perf_counter()
    ce = assemble_central(rd, rep, c, blocks=blocks)
    t2 = time.perf_counter()
    verdict = verify_central(ce, rep, verify_sites, c=c, raise_on_fail=False) if verify_sites else None
    t3 = time.perf_counter()
    return {
        "type": str(t),
        "convention": c.to_json(),
        "stages_s": {
            "blocks": round(t1 - t0, 4),
            "assembly": round(t2 - t1, 4),
            "verification": round(t3 - t2, 4),
            "total": round(t3 - t0, 4),
        },
        "verified": None if verdict is None else verdict.passed,
        "verify_sites": verify_sites,
        "terms": len(ce.element.terms),
        "blocks": [blocks[mu].stats_line() for mu in weights],
        "machine": platform.platform(),
        "python": platform.python_version(),
    }


def _round_sig(a: np.ndarray, digits: int) -> np.ndarray:
    out = np.zeros_like(a)
    nz = a != 0
    mag = np.floor(np.log10(np.abs(a[nz])))
    scale = 10.0 ** (digits - 1 - mag)
    out[nz] = np.round(a[nz] * scale) / scale
    return out


def legacy_float_rank(t: CartanType, mu, samples=DEFAULT_SAMPLES, precision: int = 6) -> dict:
    """Numeric rank of the all-words Gram matrix versus the exact dimension."""
    rd = build_root_data(t)
    mu = tuple(mu)
    words = words_of_weight(mu)
    form = _form_table(rd)
    n = len(words)
    laurent = [[_word_pair_laurent(form, u, v) for v in words] for u in words]
    ranks = []
    for q0 in samples:
        g = np.zeros((n, n))
        for i, j in itertools.product(range(n), repeat=2):
            g[i, j] = sum(cf * q0 ** e for e, cf in laurent[i][j])
        # the common factor (1 - q^2)^{-ht} is applied like the old script did
        g *= (1 - q0 * q0) ** (-sum(mu))
        g = _round_sig(g, precision)
        sv = np.linalg.svd(g, compute_uv=False)
        tol = sv[0] * n * 10.0 ** (-precision) if sv.size else 0.0
        ranks.append(int((sv > tol).sum()))
    numeric = max(ranks) if ranks else 0
    exact = kostant_count(rd.positive_roots, mu)
    return {
        "type": str(t),
        "weight": list(mu),
        "words": n,
        "samples": list(samples),
        "precision_digits": precision,
        "threshold": "sigma > sigma_max * n * 10^-precision",
        "numeric_rank_per_sample": ranks,
        "numeric_rank": numeric,
        "exact_rank": exact,
        "discrepancy": exact - numeric,
    }


def report_markdown(timings: list[dict], legacy: list[dict]) -> str:
    lines = ["# Benchmark report", ""]
    if timings:
        lines += ["| type | blocks (s) | assembly (s) | verification (s) | total (s) | largest block | verified |",
                  "|---|---|---|---|---|---|---|"]
        for r in timings:
            s = r["stages_s"]
            big = max((b["dimension"] for b in r["blocks"]), default=0)
            lines.append(f"| {r['type']} | {s['blocks']} | {s['assembly']} | {s['verification']} | {s['total']} "
                         f"| {big} | {r['verified']} |")
        lines.append("")
    if legacy:
        lines += ["| type | weight | words | digits | numeric rank | exact rank | discrepancy |",
                  "|---|---|---|---|---|---|---|"]
        for r in legacy:
            lines.append(f"| {r['type']} | {r['weight']} | {r['words']} | {r['precision_digits']} "
                         f"| {r['numeric_rank']} | {r['exact_rank']} | {r['discrepancy']} |")
        lines.append("")
    return "\n".join(lines)


def report_json(timings: list[dict], legacy: list[dict]) -> str:
    return json.dumps({"timings": timings, "legacy": legacy}, indent=2)
