"""Command-line driver.

Exit codes: 0 all checks pass, 1 usage or shape error, 2 resource refusal
(size cap), 3 a check failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import automorphism as aut
from .group_ring import as_trivial_unit, augmentation, random_element, try_inverse
from .groups import DEFAULT_CAP, InvariantViolation, SizeCapError
from .tower import (TowerLevel, abelianization, all_commutators_subgroup, base_projection, build_level,
                    centralizer_of_generators, commutator_certificate_set, commutator_membership,
                    derived_subgroup, element_order, predicted_order)

EXIT_OK, EXIT_USAGE, EXIT_REFUSED, EXIT_FAILED = 0, 1, 2, 3
CAP_ENV = "SOLVTOWER_CAP"

# statement each check verifies; emitted as the record's paper_ref field
STATEMENTS = {
    "size": "|G(r+1)| = |G(r)| * n^(|G(r)|(m-1)+1) with |G(0)| = 1",
    "group_axioms": "enumerated level is a group generated by x_1..x_m with consistent word table",
    "generator_orders": "each generator of level r has order n^r",
    "abelianization": "G/[G,G] = (Z/n^r Z)^m",
    "magnus_membership": "(g, sum a_i t_i) is in the image iff 1 - g = sum a_i (1 - g_i)",
    "base_kernel": "{(1, t) in image} is the kernel of the projection to the level below",
    "ring_axioms": "Z_n[G] is an associative ring with augmentation a ring homomorphism",
    "centralizer_relation": "z central in x_j implies (1 - x_j) a_i(z) = 0 for i != j",
    "commutator_subgroup": "[G,G] = {(1, (1-y)p t_x - (1-x)p t_y) : p in Z_n[Z_n^2]}",
    "sigma_example": "x -> (x | y t_x + (1-x) t_y), y -> (y | (1-y) t_x + x t_y) is IA and not inner, d = x+y-1 (n prime)",
    "ia_prime_equals_inn": "IA automorphisms in the closure are inner; closure/Inn = GL'_2(Z_{n^2})",
    "determinant_laws": "the determinant is a unit for every automorphism and +-x^i y^j on the closure",
}


@dataclass
class RunConfig:
    m: int = 2
    r: int = 2
    n: int = 2
    cap: int = DEFAULT_CAP
    seed: int = 0
    output: Optional[str] = None
    format: str = "json"

    def validate(self):
        if self.m < 2 or self.r < 0 or self.n < 2 or self.cap < 1:
            raise UsageError(f"need m >= 2, r >= 0, n >= 2, cap >= 1 (got m={self.m}, r={self.r}, "
                             f"n={self.n}, cap={self.cap})")


class UsageError(Exception):
    pass


def _record(check: str, status: str, details: dict) -> dict:
    return {"check": check, "paper_ref": STATEMENTS[check], "status": status, "details": details}


def _run_check(check: str, fn: Callable[[], tuple[bool, dict]]) -> dict:
    try:
        ok, details = fn()
    except InvariantViolation as exc:
        return _record(check, "fail", {"error": str(exc)})
    return _record(check, "pass" if ok else "fail", details)


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


def verify_checks(level: TowerLevel, seed: int = 0, ring_triples: int = 300) -> list[dict]:
    """Every check applicable at (m, r, n), in a fixed order."""
    m, r, n = level.m, level.r, level.n
    g = level.group
    rng = np.random.default_rng(seed)
    out = []

    def size():
        p = predicted_order(m, r, n)
        return g.order == p, {"predicted": p, "enumerated": g.order}

    out.append(_run_check("size", size))

    def axioms():
        g.check_axioms(sample=None if g.order <= 10**4 else 2000, seed=seed)
        return True, {"exhaustive": g.order <= 10**4}

    out.append(_run_check("group_axioms", axioms))

    def orders():
        got = [element_order(level, x) for x in g.generators]
        expected = n**r if r else 1
        return all(o == expected for o in got), {"orders": got, "expected": expected}

    out.append(_run_check("generator_orders", orders))
    if r == 0:
        return out

    def ab():
        A = abelianization(level)
        return True, {"invariant_factors": A.invariant_factors,
                      "derived_subgroup_order": int(A.derived_subgroup.size)}

    out.append(_run_check("abelianization", ab))
    if r < 2:
        return out

    def membership():
        holds = g.membership_all()
        return bool(holds.all()), {"elements": int(holds.size), "failures": int((~holds).sum())}

    out.append(_run_check("magnus_membership", membership))

    def kernel():
        proj = base_projection(level)
        k = proj.kernel().size
        return k * level.base.order == g.order, {"kernel_order": int(k), "quotient_order": level.base.order}

    out.append(_run_check("base_kernel", kernel))

    def ring():
        ctx = g.ctx
        bad = 0
        for _ in range(ring_triples):
            a, b, c = (random_element(ctx, rng, max_terms=6) for _ in range(3))
            if (a * b) * c != a * (b * c) or a * (b + c) != a * b + a * c or (a + b) * c != a * c + b * c:
                bad += 1
            if augmentation(a * b) != augmentation(a) * augmentation(b):
                bad += 1
        return bad == 0, {"triples": ring_triples, "failures": bad}

    out.append(_run_check("ring_axioms", ring))

    def centralizer():
        z = centralizer_of_generators(level)
        return True, {"center_order": len(z)}

    out.append(_run_check("centralizer_relation", centralizer))
    if (m, r) != (2, 2):
        return out

    def commutators():
        D = derived_subgroup(level)
        cert = commutator_certificate_set(level)
        details = {"derived_subgroup_order": int(D.size), "certificate_set_order": int(cert.size)}
        ok = np.array_equal(cert, D)
        if g.order <= 10**4:
            per = np.array([i for i in range(g.order) if commutator_membership(level, i) is not None])
            brute = all_commutators_subgroup(level)
            ok = ok and np.array_equal(per, brute) and np.array_equal(brute, D)
            details["brute_force_order"] = int(brute.size)
        return ok, details

    out.append(_run_check("commutator_subgroup", commutators))

    def sigma():
        rep = aut.sigma_report(level)
        if _is_prime(n):
            ok = (rep["is_auto"] and rep["is_ia"] and not rep["is_inner"] and rep["det_is_x_plus_y_minus_1"]
                  and rep["det_invertible"] and not rep.get("is_inner_bruteforce", False))
        else:
            ok = True
        return ok, rep

    out.append(_run_check("sigma_example", sigma))

    if g.order > 10**4:
        out.append(_record("ia_prime_equals_inn", "skipped",
                           {"reason": "Aut' closure too large at this level; run aut-closure"}))
        out.append(_record("determinant_laws", "skipped", {"reason": "needs the Aut' closure"}))
        return out
    closure = aut.generate_aut_prime(level)

    def last():
        rep = aut.out_kernel_comparison(closure)
        if not rep["conclusive"]:
            return True, rep
        agree = True
        for rec in closure.records:
            if rec.is_IA:
                w = aut.ia_inner_test_constructive(rec.endo)
                agree &= (w is not None) == (aut.is_inner_bruteforce(rec.endo) is not None)
        rep["oracles_agree"] = agree
        ok = rep["surjective"] and rep["ia_prime_equals_inn"] and rep["out_prime_equals_glprime"] and agree
        return ok, rep

    out.append(_run_check("ia_prime_equals_inn", last))

    def dets():
        units = sum(try_inverse(rec.det_ring) is not None for rec in closure.records)
        mono = sum(as_trivial_unit(rec.det_ring) is not None for rec in closure.records)
        total = len(closure.records)
        return units == total and mono == total, {"records": total, "unit": units, "monomial": mono}

    out.append(_run_check("determinant_laws", dets))
    return out


def _level_or_refuse(cfg: RunConfig) -> TowerLevel:
    return build_level(cfg.m, cfg.r, cfg.n, cfg.cap)


def _refusal(cfg: RunConfig, exc: SizeCapError) -> dict:
    return {"status": "refused", "m": cfg.m, "r": cfg.r, "n": cfg.n, "cap": cfg.cap,
            "predicted_order": str(exc.bound) if exc.bound is not None else None,
            "predicted_order_expr": exc.expr, "message": str(exc)}


def cmd_verify(cfg: RunConfig) -> tuple[int, dict]:
    level = _level_or_refuse(cfg)
    checks = verify_checks(level, cfg.seed)
    failed = [c["check"] for c in checks if c["status"] == "fail"]
    status = "fail" if failed else "pass"
    return (EXIT_FAILED if failed else EXIT_OK), {
        "config": {"m": cfg.m, "r": cfg.r, "n": cfg.n, "cap": cfg.cap, "seed": cfg.seed},
        "status": status, "checks": checks}


def _require_rank2_metabelian(cfg: RunConfig):
    if (cfg.m, cfg.r) != (2, 2):
        raise UsageError(f"this command requires m = 2 and r = 2 (got m={cfg.m}, r={cfg.r})")


def cmd_sigma(cfg: RunConfig) -> tuple[int, dict]:
    _require_rank2_metabelian(cfg)
    level = _level_or_refuse(cfg)
    return EXIT_OK, aut.sigma_report(level)


def cmd_order(cfg: RunConfig) -> tuple[int, dict]:
    level = _level_or_refuse(cfg)
    orders = [element_order(level, g) for g in level.group.generators]
    expected = cfg.n**cfg.r
    match = all(o == expected for o in orders)
    return (EXIT_OK if match else EXIT_FAILED), {
        "m": cfg.m, "r": cfg.r, "n": cfg.n, "generator_orders": orders, "expected": expected, "match": match}


def cmd_size(cfg: RunConfig) -> tuple[int, dict]:
    try:
        predicted = predicted_order(cfg.m, cfg.r, cfg.n)
    except OverflowError as exc:
        raise SizeCapError(str(exc)) from exc
    level = _level_or_refuse(cfg)
    return (EXIT_OK if level.order == predicted else EXIT_FAILED), {
        "m": cfg.m, "r": cfg.r, "n": cfg.n, "predicted": predicted, "enumerated": level.order,
        "match": level.order == predicted}


def cmd_aut_closure(cfg: RunConfig, budget: int = aut.DEFAULT_BUDGET) -> tuple[int, dict]:
    _require_rank2_metabelian(cfg)
    level = _level_or_refuse(cfg)
    closure = aut.generate_aut_prime(level, budget=budget, flags=True)
    rep = aut.out_kernel_comparison(closure)
    sig = aut.sigma_report(level)
    rep["sigma_example"] = {k: sig[k] for k in ("is_auto", "is_ia", "is_inner", "det")}
    if not rep["conclusive"]:
        return EXIT_OK, rep
    ok = rep["surjective"] and rep["ia_prime_equals_inn"] and rep["out_prime_equals_glprime"]
    return (EXIT_OK if ok else EXIT_FAILED), rep


def export_group(level: TowerLevel, table_threshold: int = 4096) -> dict:
    g = level.group
    out = {"m": level.m, "r": level.r, "n": level.n, "order": g.order, "generators": list(g.generators)}
    if g.order <= table_threshold:
        out["table"] = g.table.tolist()
    out["words"] = {str(k): str(g.word(k)) for k in range(g.order)}
    return out


def cmd_export(cfg: RunConfig, table_threshold: int = 4096) -> tuple[int, dict]:
    level = _level_or_refuse(cfg)
    return EXIT_OK, export_group(level, table_threshold)


def _flatten(payload: dict) -> list[tuple[str, str]]:
    rows = []
    if "checks" in payload:
        for c in payload["checks"]:
            rows.append((c["check"], c["status"]))
        rows.append(("status", payload["status"]))
        return rows
    for k, v in payload.items():
        if isinstance(v, (int, str, bool, float)) or v is None:
            rows.append((k, "" if v is None else str(v)))
        elif isinstance(v, list) and all(isinstance(x, (int, str)) for x in v):
            rows.append((k, ";".join(map(str, v))))
        elif isinstance(v, dict):
            rows.extend((f"{k}.{kk}", str(vv)) for kk, vv in v.items() if not isinstance(vv, (list, dict)))
    return rows


def render_payload(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(_flatten(payload))
        return buf.getvalue()
    if "checks" in payload:
        lines = [f"{c['status'].upper():8s} {c['check']}: {c['paper_ref']}" for c in payload["checks"]]
        lines.append(f"overall: {payload['status']}")
        return "\n".join(lines) + "\n"
    return "\n".join(f"{k}: {v}" for k, v in _flatten(payload)) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int, default=2, help="number of generators")
    common.add_argument("--r", type=int, default=2, help="solvability length")
    common.add_argument("--n", type=int, default=2, help="exponent modulus")
    common.add_argument("--cap", type=int, default=None,
                        help=f"element budget (default ${CAP_ENV} or {DEFAULT_CAP})")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    parser = _Parser(prog="solvtower", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("verify", parents=[common], help="run every applicable check")
    sub.add_parser("sigma", parents=[common], help="report on the sigma example (m=2, r=2)")
    sub.add_parser("order", parents=[common], help="generator orders against n^r")
    sub.add_parser("size", parents=[common], help="predicted against enumerated order")
    p = sub.add_parser("aut-closure", parents=[common], help="Aut'/Inn/GL'_2 comparison (m=2, r=2)")
    p.add_argument("--budget", type=int, default=aut.DEFAULT_BUDGET)
    p = sub.add_parser("export", parents=[common], help="multiplication and word tables as JSON")
    p.add_argument("--table-threshold", type=int, default=4096,
                   help="omit the multiplication table above this order")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cap = args.cap
    if cap is None:
        env = os.environ.get(CAP_ENV)
        try:
            cap = int(env) if env else DEFAULT_CAP
        except ValueError:
            print(f"solvtower: error: {CAP_ENV}={env!r} is not an integer", file=sys.stderr)
            return EXIT_USAGE
    cfg = RunConfig(args.m, args.r, args.n, cap, args.seed, args.out, args.format)
    fmt = cfg.format
    if args.command == "export" and fmt != "json":
        fmt = "json"  # full tables are JSON-only
    try:
        cfg.validate()
        if args.command == "verify":
            code, payload = cmd_verify(cfg)
        elif args.command == "sigma":
            code, payload = cmd_sigma(cfg)
        elif args.command == "order":
            code, payload = cmd_order(cfg)
        elif args.command == "size":
            code, payload = cmd_size(cfg)
        elif args.command == "aut-closure":
            code, payload = cmd_aut_closure(cfg, args.budget)
        else:
            code, payload = cmd_export(cfg, args.table_threshold)
    except UsageError as exc:
        print(f"solvtower: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeCapError as exc:
        code, payload = EXIT_REFUSED, _refusal(cfg, exc)
    text = render_payload(payload, fmt)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
