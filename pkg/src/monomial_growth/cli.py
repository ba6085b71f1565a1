"""Command-line entry point.

Subcommands: build, verify, dims, dump.  Exit codes: 0 all passed,
1 verification failure, 2 usage or configuration error, 3 capacity or
horizon exhaustion.  Every emitted report embeds the configuration hash,
tool version and horizon; files are written atomically.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .construction import (
    ConstructionState,
    MemoryBudgetError,
    build,
    strategy_from_string,
    verify_growth_bounds,
)
from .growth import (
    FeasibilityError,
    GrowthError,
    HorizonExhaustedError,
    check_admissible,
    parse_growth,
)
from .nilpotent import (
    build_marked,
    certify_locally_nilpotent,
    check_marked_degree_recursion,
    check_marked_prime,
    check_window_marked_bound,
    verify_marked_growth,
)
from .prime import check_prime, square_zero_certificate, verify_entropy_range
from .reports import FAIL, PASS, ClaimRecord, Report
from .saturation import (
    check_container_powers,
    check_nonnilpotent_witness,
    check_choice_promotion,
    saturate,
    verify_saturated_growth,
)
from .storage import (
    StateFileError,
    load_marked,
    load_saturated,
    load_state,
    save_marked,
    save_saturated,
    save_state,
)
from .wordstore import CapacityError

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _config_hash(args: argparse.Namespace) -> str:
    payload = {k: str(v) for k, v in sorted(vars(args).items()) if k != "func"}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:12]


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _state_path(args) -> str:
    return os.path.join(args.out, f"state-{args.strategy}.txt")


def _build_system(args):
    growth = parse_growth(args.f)
    if args.strategy == "tilde":
        eps = _parse_eps_seq(args.eps_seq) if args.eps_seq else None
        return build_marked(growth, args.depth, eps)
    if args.strategy == "primitive":
        base = build(growth, args.depth, strategy_from_string("plain"),
                     mem_cap=args.mem_cap)
        eps = _parse_eps_seq(args.eps_seq) if args.eps_seq else None
        return saturate(base, eps)
    name = {"plain": "plain", "prime": "prime", "nonprime": "nonprime"}[args.strategy]
    if name == "seeded" or args.seed is not None:
        name = f"seeded:{args.seed}"
    return build(growth, args.depth, strategy_from_string(name), mem_cap=args.mem_cap)


def _parse_eps_seq(text: str) -> list[Fraction]:
    return [Fraction(t) for t in text.split(",")]


def cmd_build(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    system = _build_system(args)
    path = _state_path(args)
    if args.strategy == "tilde":
        save_marked(system, path)
        log = system.build_log
    elif args.strategy == "primitive":
        save_saturated(system, path)
        log = [f"pass {a}: inserted at levels {sorted(d.inserted)}"
               for a, d in enumerate(system.passes)]
    else:
        save_state(system, path)
        log = system.build_log
    _atomic_write(
        os.path.join(args.out, "build.log"),
        "\n".join([f"config {_config_hash(args)}", f"version {__version__}"] + log) + "\n",
    )
    print(f"state written to {path}")
    return EXIT_OK


def _load_for_verify(args):
    path = _state_path(args)
    if not os.path.exists(path):
        return _build_system(args)
    if args.strategy == "tilde":
        return load_marked(path)
    if args.strategy == "primitive":
        return load_saturated(path)
    return load_state(path)


def _run_suites(args, system) -> list[Report]:
    suites = []
    want = args.suite

    def on(name):
        return want in (name, "all")

    if isinstance(system, ConstructionState):
        if on("growth"):
            suites.append(verify_growth_bounds(system))
        if on("prime"):
            rep = Report("prime-witnesses", system.depth)
            pr = check_prime(system, args.max_len)
            counts = pr.counts()
            rep.add(ClaimRecord(
                "prime.pairs", PASS if pr.passed else FAIL,
                params={"universe": pr.universe_size, **counts},
                witness=None if pr.passed else
                f"{pr.violations[0].left},{pr.violations[0].right}",
                horizon=system.depth,
            ))
            suites.append(rep)
        if on("nonprime"):
            suites.append(square_zero_certificate(system, system.store.letters[0]))
        if on("entropy"):
            if system.growth.family != "nearexp":
                rep = Report("entropy-range", system.depth)
                rep.add(ClaimRecord("entropy.family", FAIL,
                                    note="entropy suite needs a nearexp build"))
                suites.append(rep)
            else:
                suites.append(verify_entropy_range(system, system.growth.eps))
    elif hasattr(system, "passes"):  # saturated
        if on("primitive") or on("growth"):
            suites.append(verify_saturated_growth(system))
        if on("primitive"):
            suites.append(check_container_powers(system, args.max_len,
                                                 args.min_witnesses))
            rep = Report("nonnilpotent-witnesses", system.depth)
            for w in sorted(
                {w for L in range(1, args.max_len + 1)
                 for w in _short_factors(system.base, L)}
            ):
                rep.add(check_nonnilpotent_witness(system, w))
            suites.append(rep)
            suites.append(check_choice_promotion(system, min(args.max_len, 2)))
    else:  # marked
        if on("lambda"):
            suites.append(check_marked_degree_recursion(system))
            suites.append(check_window_marked_bound(system, 1 << system.depth))
        if on("locnil"):
            rep = Report("local-nilpotency", system.depth)
            gens = (args.gens.split(",") if args.gens
                    else [system.marked_letter])
            res = certify_locally_nilpotent(system, gens, args.max_deg)
            rep.add(ClaimRecord(
                "ideal.locally.nilpotent",
                PASS if res.certified else FAIL,
                params={"generators": ",".join(res.generators),
                        "degree": res.degree, "bound": res.a_priori_bound},
                horizon=system.depth,
            ))
            suites.append(rep)
        if on("growth"):
            suites.append(verify_marked_growth(system))
        if on("prime"):
            suites.append(check_marked_prime(system, min(args.max_len, 4)))
    return suites


def _short_factors(state, length):
    from . import factors

    return factors.enumerate_factors(state.store, state.w_root(state.depth), length)


def cmd_verify(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    system = _load_for_verify(args)
    suites = _run_suites(args, system)
    if not suites:
        print(f"no suite named {args.suite!r} applies to this build", file=sys.stderr)
        return EXIT_USAGE
    ok = True
    chash = _config_hash(args)
    for rep in suites:
        rep.config_hash = chash
        rep.tool_version = __version__
        base = os.path.join(args.out, f"report-{rep.name}")
        _atomic_write(base + ".json", rep.to_json() + "\n")
        _atomic_write(base + ".txt", rep.to_text() + "\n")
        print(rep.to_text())
        ok = ok and rep.passed
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_dims(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    system = _load_for_verify(args)
    if not isinstance(system, ConstructionState):
        print("dims applies to base builds", file=sys.stderr)
        return EXIT_USAGE
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["length", "dim_lo", "dim_hi", "exact", "f", "upper_bound"])
    f = system.growth
    for n in range(system.depth + 1):
        dm = system.dim(1 << n)
        writer.writerow([
            1 << n, dm.lo, dm.hi, dm.exact, f.dyadic(n),
            (1 << (2 * n + 3)) * f.dyadic(n + 1),
        ])
    _atomic_write(os.path.join(args.out, "dims.csv"), buf.getvalue())
    print(buf.getvalue(), end="")
    return EXIT_OK


def cmd_dump(args) -> int:
    system = _load_for_verify(args)
    if not isinstance(system, ConstructionState):
        print("dump applies to base builds", file=sys.stderr)
        return EXIT_USAGE
    if args.level > system.depth:
        print(f"level {args.level} beyond depth {system.depth}", file=sys.stderr)
        return EXIT_USAGE
    try:
        words = system.w_words(args.level)
    except MemoryBudgetError as e:
        print(str(e), file=sys.stderr)
        return EXIT_CAPACITY
    print(f"# level {args.level} words ({len(words)})")
    for w in words:
        print(w)
    if args.level < system.depth:
        print(f"# level {args.level} choice words ({system.levels[args.level].c_count})")
        for w in system.c_words(args.level):
            print(w)
    return EXIT_OK


def cmd_check_growth(args) -> int:
    rep = check_admissible(parse_growth(args.f), args.doubling_c, args.horizon)
    print(json.dumps({
        "spec": rep.spec,
        "monotone": rep.monotone,
        "strict_on_powers": rep.strict_on_powers,
        "submultiplicative": rep.submultiplicative,
        "doubling_superlinear": rep.doubling_superlinear,
        "doubling_witness": rep.doubling_witness,
        "tail_min_ratio": str(rep.tail_min_ratio),
        "horizon": rep.horizon,
    }, indent=2))
    return EXIT_OK if rep.passed else EXIT_VERIFY_FAILED


def make_parser() -> _Parser:
    p = _Parser(prog="monomial-growth")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(q):
        q.add_argument("--f", required=True, help="growth spec, e.g. exproot:d=2,beta=1/2")
        q.add_argument("--depth", type=int, required=True)
        q.add_argument("--strategy", default="plain",
                       choices=["plain", "prime", "nonprime", "primitive", "tilde"])
        q.add_argument("--eps", default=None)
        q.add_argument("--eps-seq", dest="eps_seq", default=None)
        q.add_argument("--seed", type=int, default=None)
        q.add_argument("--max-len", dest="max_len", type=int, default=4)
        q.add_argument("--min-witnesses", dest="min_witnesses", type=int, default=3)
        q.add_argument("--max-deg", dest="max_deg", type=int, default=None)
        q.add_argument("--gens", default=None)
        q.add_argument("--mem-cap", dest="mem_cap", type=int,
                       default=256 * 1024 * 1024)
        q.add_argument("--out", default="out")
        q.add_argument("--format", default="json", choices=["json", "text", "csv"])

    q = sub.add_parser("build", help="build a construction and persist it")
    common(q)
    q.set_defaults(func=cmd_build)

    q = sub.add_parser("verify", help="run a verifier suite against a build")
    q.add_argument("suite", choices=[
        "growth", "prime", "nonprime", "entropy", "primitive",
        "lambda", "locnil", "all",
    ])
    common(q)
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("dims", help="dimension table as CSV")
    common(q)
    q.set_defaults(func=cmd_dims)

    q = sub.add_parser("dump", help="list the words of one level")
    common(q)
    q.add_argument("--level", type=int, required=True)
    q.set_defaults(func=cmd_dump)

    q = sub.add_parser("check-growth", help="admissibility report for a growth spec")
    q.add_argument("--f", required=True)
    q.add_argument("--doubling-c", dest="doubling_c", type=int, default=16)
    q.add_argument("--horizon", type=int, default=64)
    q.set_defaults(func=cmd_check_growth)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GrowthError, StateFileError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (HorizonExhaustedError, FeasibilityError, CapacityError,
            MemoryBudgetError) as e:
        print(f"capacity/horizon: {e}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    raise SystemExit(main())
