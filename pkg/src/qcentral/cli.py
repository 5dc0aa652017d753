"""Command line: central, verify, generator, simulate, bench.

Exit codes: 0 success, 2 verification failure, 3 unsupported input,
4 internal assertion (e.g. a non-diagonal pairing).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bench import DEFAULT_SAMPLES, legacy_float_rank, report_json, report_markdown, time_pipeline
from .cartan import CartanType, UnsupportedType, build_root_data
from .central import CentralElement, assemble_central, coefficient_report, required_weights
from .markov import DiscardLeakage, MarkovGenerator, flag_problematic, ground_transform, simulate
from .rep import NotCentral, hamiltonian, vector_rep, verify_central
from .uqalg import Convention, ConventionMismatch

EXIT_OK, EXIT_VERIFY, EXIT_UNSUPPORTED, EXIT_INTERNAL = 0, 2, 3, 4
JOBS_ENV = "QCENTRAL_JOBS"

log = logging.getLogger("qcentral")


class BadInput(ValueError):
    pass


def parse_rational(s: str) -> Fraction:
    """Exact rational from ``p/q`` or an integer; decimals are refused."""
    s = s.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", s):
        raise BadInput(f"{s!r} is not an exact rational of the form p/q")
    return Fraction(s)


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _provenance(conv: Convention | None, inputs: dict[str, str], args: dict) -> dict:
    out = {
        "tool": "qcentral",
        "version": __version__,
        "q_integer": "symmetric: [n] = (q^n - q^-n)/(q - q^-1)",
        "inputs": inputs,
        "arguments": args,
    }
    if conv is not None:
        out["convention"] = conv.to_json()
    return out


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(path).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + "\n"


def _default_jobs() -> int:
    env = os.environ.get(JOBS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _strip_timing(stats: dict) -> dict:
    stats = dict(stats)
    stats["blocks"] = [{k: v for k, v in b.items() if k != "elapsed_ms"} for b in stats.get("blocks", [])]
    stats.pop("elapsed_blocks_s", None)
    stats.pop("elapsed_total_s", None)
    return stats


def cmd_central(a) -> int:
    t = CartanType(a.family, a.rank)
    conv = Convention(braid=a.convention, coproduct=a.coproduct)
    rd = build_root_data(t)
    rep = vector_rep(t)
    ce = assemble_central(rd, rep, conv, jobs=a.jobs)
    sites = a.verify_sites
    if sites is None:
        sites = 2 if rep.dim <= 4 else 1
    verdict = verify_central(ce, rep, sites, c=conv, raise_on_fail=False) if sites > 0 else None
    data = ce.to_json()
    if not a.timings:
        data["stats"] = _strip_timing(data["stats"])
    data["stats"]["coefficients"] = coefficient_report(ce)
    data["verification"] = verdict.to_json() if verdict else None
    data["provenance"] = _provenance(conv, {}, {"family": a.family, "rank": a.rank})
    _write(a.out, _dump(data))
    if verdict is not None and not verdict.passed:
        return EXIT_VERIFY
    return EXIT_OK


def _load_central(path) -> tuple[CentralElement, dict]:
    data = json.loads(Path(path).read_text())
    return CentralElement.from_json(data), {str(path): _sha256(path)}


def cmd_verify(a) -> int:
    ce, inputs = _load_central(a.central)
    rep = vector_rep(ce.type_rank)
    samples = [parse_rational(x) for x in a.q.split(",")] if a.q else [Fraction(4, 5), Fraction(5, 3)]
    v = verify_central(ce, rep, a.sites, mode=a.mode, samples=samples, c=ce.convention, raise_on_fail=False)
    out = v.to_json()
    out["provenance"] = _provenance(ce.convention, inputs, {"sites": a.sites, "mode": a.mode,
                                                            "q": [str(x) for x in samples]})
    _write(a.out, _dump(out))
    return EXIT_OK if v.passed else EXIT_VERIFY


def cmd_generator(a) -> int:
    ce, inputs = _load_central(a.central)
    q0 = parse_rational(a.q0)
    rep = vector_rep(ce.type_rank)
    H = hamiltonian(rep, ce, a.sites, ce.convention, kind=a.kind)
    G = ground_transform(H, q0=q0 if a.exact_at_q0 else None)
    R = flag_problematic(G, q0)
    data = R.to_json()
    data["sites"] = a.sites
    data["hamiltonian"] = a.kind
    data["provenance"] = _provenance(ce.convention, inputs, {"sites": a.sites, "q0": str(q0), "kind": a.kind})
    _write(a.out, _dump(data))
    return EXIT_OK


def cmd_simulate(a) -> int:
    data = json.loads(Path(a.gen).read_text())
    G = MarkovGenerator.from_json(data)
    if G.is_symbolic():
        raise BadInput("generator file has symbolic rates; regenerate with --q0")
    tmax = float(parse_rational(a.tmax)) if "/" in a.tmax else float(Fraction(a.tmax))
    tr = simulate(G, tmax, a.seed, start=a.start)
    head = f"# qcentral {__version__}; generator sha256 {_sha256(a.gen)}; seed {a.seed}; q0 {G.q0}\n"
    _write(a.out, head + tr.events_csv())
    if a.heights:
        _write(a.heights, head + tr.heights_csv())
    return EXIT_OK


def cmd_bench(a) -> int:
    t = CartanType(a.family, a.rank)
    conv = Convention(braid=a.convention, coproduct=a.coproduct)
    timings, legacy = [], []
    if a.legacy:
        if a.weight:
            mu = tuple(int(x) for x in a.weight.split(","))
        else:
            rd = build_root_data(t)
            ws = required_weights(rd, vector_rep(t))
            mu = max(ws, key=lambda m: (sum(m), m))
        samples = [float(x) for x in a.samples.split(",")] if a.samples else list(DEFAULT_SAMPLES)
        legacy.append(legacy_float_rank(t, mu, samples, a.precision))
    else:
        timings.append(time_pipeline(t, conv, a.verify_sites, jobs=a.jobs))
    _write(a.out, report_markdown(timings, legacy))
    if a.json:
        _write(a.json, report_json(timings, legacy))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcentral", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qcentral {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def conv_flags(sp):
        sp.add_argument("--convention", choices=["primary", "alt"], default="primary",
                        help="braid-operator convention for root vectors")
        sp.add_argument("--coproduct", choices=["standard", "flipped"], default="standard")

    s = sub.add_parser("central", help="assemble a central element")
    s.add_argument("--family", required=True)
    s.add_argument("--rank", type=int, required=True)
    conv_flags(s)
    s.add_argument("--out", default="-")
    s.add_argument("--jobs", type=int, default=None, help=f"block workers (default ${JOBS_ENV} or CPU count)")
    s.add_argument("--verify-sites", type=int, default=None,
                   help="sites for the built-in centrality check (0 disables)")
    s.add_argument("--timings", action="store_true", help="include wall-clock fields in stats")
    s.set_defaults(func=cmd_central)

    s = sub.add_parser("verify", help="commutator check of a central element file")
    s.add_argument("--central", required=True)
    s.add_argument("--sites", type=int, default=2)
    s.add_argument("--mode", choices=["symbolic", "sampled"], default="symbolic")
    s.add_argument("--q", default=None, help="comma-separated exact rationals for sampled mode")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("generator", help="Markov generator from a central element")
    s.add_argument("--central", required=True)
    s.add_argument("--sites", type=int, required=True)
    s.add_argument("--q0", default="4/5")
    s.add_argument("--kind", choices=["bond", "full"], default="bond",
                   help="nearest-neighbour bond sum or the full L-fold coproduct")
    s.add_argument("--exact-at-q0", action="store_true",
                   help="do the ground-state transform over Q at q0 instead of over Q(q)")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_generator)

    s = sub.add_parser("simulate", help="Gillespie trajectory of a generator file")
    s.add_argument("--gen", required=True)
    s.add_argument("--tmax", required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--start", default=None, help="initial state label (default: drawn from the seed)")
    s.add_argument("--out", default="-")
    s.add_argument("--heights", default=None)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("bench", help="pipeline timing or the floating-point rank baseline")
    s.add_argument("--legacy", action="store_true")
    s.add_argument("--family", required=True)
    s.add_argument("--rank", type=int, required=True)
    conv_flags(s)
    s.add_argument("--weight", default=None, help="comma-separated simple-root coordinates (legacy)")
    s.add_argument("--samples", default=None, help="comma-separated float q values (legacy only)")
    s.add_argument("--precision", type=int, default=4, help="significant digits (legacy)")
    s.add_argument("--verify-sites", type=int, default=1)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", default="-")
    s.add_argument("--json", default=None)
    s.set_defaults(func=cmd_bench)
    return p


def _fail(code: int, exc: BaseException, **extra) -> int:
    err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    err.update(extra)
    sys.stderr.write(json.dumps(err) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(a, "jobs", 1) is None:
        a.jobs = _default_jobs()
    try:
        return a.func(a)
    except (NotCentral, DiscardLeakage) as exc:
        return _fail(EXIT_VERIFY, exc)
    except (UnsupportedType, BadInput, ConventionMismatch, FileNotFoundError, json.JSONDecodeError) as exc:
        return _fail(EXIT_UNSUPPORTED, exc)
    except (AssertionError, ArithmeticError) as exc:
        return _fail(EXIT_INTERNAL, exc)
    except ValueError as exc:
        return _fail(EXIT_UNSUPPORTED, exc)


if __name__ == "__main__":
    sys.exit(main())
