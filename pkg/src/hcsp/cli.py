"""Command-line front end. JSON goes to stdout; status is data, not the exit code.

Exit codes: 0 success (including UNSAT and NPC answers), 1 a self-test
check failed, 2 bad input, 3 an internal invariant broke.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Any, Sequence

from .acceptance import CHECKS, run_all
from .behaviours import behaviour_catalog
from .classify import classify
from .core import DelegatedBase, HcspError, InvariantBreach, Signature
from .gadgets import h_signature, reduce_1in3
from .jsonio import (base_from_json, dumps, formula_from_json, instance_from_json, instance_to_json,
                     load_json, relation_to_json, result_to_json, signature_from_json, signature_to_json)
from .oracle import oracle_solve, random_instance, random_relation
from .solve import SOLVERS, solve

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _base_arg(text: str) -> dict[str, Any]:
    """Parse henson:3, equiv:omega:2, equiv:2:omega or equality."""
    parts = text.split(":")
    def param(p: str) -> Any:
        return p if p == "omega" else int(p)
    try:
        if parts[0] == "henson" and len(parts) == 2:
            return {"kind": "henson", "n": param(parts[1])}
        if parts[0] == "equiv" and len(parts) == 3:
            return {"kind": "equiv", "n": param(parts[1]), "s": param(parts[2])}
        if parts == ["equality"]:
            return {"kind": "equality"}
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"bad base {text!r}; use henson:3, equiv:omega:2 or equality")


def _delegated_signature(path: str) -> str | None:
    """Reason text when the signature's base is out of scope, else None."""
    raw = load_json(path)
    try:
        base_from_json(raw.get("base") if isinstance(raw, dict) else None)
    except DelegatedBase as exc:
        return str(exc)
    except HcspError:
        return None
    return None


def cmd_classify(args: argparse.Namespace) -> int:
    reason = _delegated_signature(args.signature)
    if reason is not None:
        print(dumps({"outcome": "DELEGATED", "witness": {"reason": reason},
                     "trail": [{"test": "base", "result": "delegated", "detail": reason}]}))
        return EXIT_OK
    sig = signature_from_json(load_json(args.signature))
    print(dumps(classify(sig, deep=args.deep).to_json()))
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    sig = signature_from_json(load_json(args.signature))
    inst = instance_from_json(load_json(args.instance))
    result = solve(sig, inst, solver=args.solver, cap=args.cap)
    out = result_to_json(inst, result)
    if args.emit_gf2:
        system = result.details.get("system")
        out["gf2"] = system.to_json() if system is not None else None
    print(dumps(out))
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    sig = signature_from_json(load_json(args.signature))
    inst = instance_from_json(load_json(args.instance))
    result = oracle_solve(sig, inst, args.cap)
    print(dumps(result_to_json(inst, result)))
    return EXIT_OK


def cmd_gadget(args: argparse.Namespace) -> int:
    inst = reduce_1in3(formula_from_json(load_json(args.formula)))
    if args.with_signature:
        print(dumps({"signature": signature_to_json(h_signature(args.n)), "instance": instance_to_json(inst)}))
    else:
        print(dumps(instance_to_json(inst)))
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    closure = None
    if args.closed_under:
        catalog = behaviour_catalog()
        if args.closed_under not in catalog:
            raise InputError(f"unknown behaviour {args.closed_under!r}; choose from {sorted(catalog)}")
        closure = catalog[args.closed_under]
    if args.what == "instance":
        if not args.signature:
            raise InputError("gen instance needs --signature")
        sig = signature_from_json(load_json(args.signature))
        print(dumps(instance_to_json(random_instance(sig, args.vars, args.constraints, args.seed))))
        return EXIT_OK
    if not args.base:
        raise InputError(f"gen {args.what} needs --base")
    base = base_from_json(args.base)
    if args.what == "relation":
        rel = random_relation(base, args.arity, args.seed, close_under=closure, name=args.name)
        print(dumps(relation_to_json(rel)))
        return EXIT_OK
    rng = random.Random(args.seed)
    rels = [random_relation(base, rng.randint(2, args.arity), rng.randrange(2 ** 32), close_under=closure,
                            name=f"R{i}") for i in range(args.count)]
    print(dumps(signature_to_json(Signature(base, tuple(rels)))))
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    only = set(args.only.split(",")) if args.only else None
    known = {key for key, *_ in CHECKS}
    if only and not only <= known:
        raise InputError(f"unknown checks {sorted(only - known)}; choose from {sorted(known)}")
    results = run_all(only, echo=lambda line: print(line, file=sys.stderr))
    print(json.dumps({"passed": sum(r.passed for r in results), "total": len(results),
                      "failed": [r.key for r in results if not r.passed]}))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hcsp", description="Classify and solve CSPs over homogeneous graphs.")
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("classify", help="P / NPC / DELEGATED verdict for a signature")
    c.add_argument("-s", "--signature", required=True)
    c.add_argument("--deep", action="store_true", help="also report all nine unary behaviours")
    c.set_defaults(run=cmd_classify)

    s = sub.add_parser("solve", help="decide an instance")
    s.add_argument("-s", "--signature", required=True)
    s.add_argument("-i", "--instance", required=True)
    s.add_argument("--solver", default="auto", choices=["auto", *SOLVERS])
    s.add_argument("--cap", type=int, default=None, help="oracle variable cap (default HCSP_CAP or 10)")
    s.add_argument("--emit-gf2", action="store_true", help="include the final GF(2) system, if any")
    s.set_defaults(run=cmd_solve)

    o = sub.add_parser("oracle", help="brute-force decision")
    o.add_argument("-s", "--signature", required=True)
    o.add_argument("-i", "--instance", required=True)
    o.add_argument("--cap", type=int, default=None)
    o.set_defaults(run=cmd_oracle)

    g = sub.add_parser("gadget", help="reduce a positive 1-in-3 formula to an H instance")
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--formula", required=True)
    g.add_argument("--with-signature", action="store_true")
    g.set_defaults(run=cmd_gadget)

    r = sub.add_parser("gen", help="seeded random relation, signature or instance")
    r.add_argument("what", choices=["relation", "signature", "instance"])
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--base", type=_base_arg)
    r.add_argument("--arity", type=int, default=3)
    r.add_argument("--count", type=int, default=2)
    r.add_argument("--name", default="R")
    r.add_argument("--closed-under", default=None)
    r.add_argument("-s", "--signature")
    r.add_argument("--vars", type=int, default=5)
    r.add_argument("--constraints", type=int, default=4)
    r.set_defaults(run=cmd_gen)

    t = sub.add_parser("selftest", help="run the acceptance checks")
    t.add_argument("--only", help="comma-separated check keys")
    t.set_defaults(run=cmd_selftest)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except InvariantBreach as exc:
        print(f"hcsp: invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InputError, HcspError, ValueError, KeyError, OSError) as exc:
        print(f"hcsp: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
