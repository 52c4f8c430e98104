"""Command line surface: validate, check, corpus.

Exit codes: 0 success, 1 malformed input (schema), 2 failed invariants or
checks, 3 oracle mode requested over the rationals.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
import time

from .algebra import (
    AlgebraError,
    NonAdmissibleError,
    PossiblyInfiniteError,
    validate_algebra,
)
from .analyze import (
    is_epsilon_stratified,
    is_highest_weight,
    is_k_homological,
    sign_patterns,
)
from .category import ModuleCategory
from .corpus import corpus_index, fixture_bytes
from .modules import simple_module
from .mv import mv_data_from_spec, mv_intermediate_table, mv_recollement
from .recollement import intermediate_extension, make_idempotent_recollement, verify_recollement
from .report import Check, Report, sha256_bytes
from .specfile import AlgebraSpec, SpecError, build_algebra, load_spec, parse_spec
from .strat import (
    Poset,
    Stratification,
    StratificationError,
    porism_check,
    synthesize_projective_cover,
)

EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_FAIL = 2
EXIT_ORACLE = 3


def _strat_of(spec: AlgebraSpec, algebra=None, check=True) -> Stratification:
    if spec.stratification is None:
        raise SpecError(f"{spec.name}: no stratification block in the input")
    a = algebra if algebra is not None else build_algebra(spec)
    ss = spec.stratification
    poset = Poset.from_pairs(ss.poset.elements, ss.poset.leq)
    return Stratification(a, poset, ss.rho, ss.epsilon, check=check)


def _mv_samples(r, data):
    out = []
    for w in data.u_algebra.vertex_names:
        su = simple_module(data.u_algebra, w)
        out.append((f"j_lower(S_u({w}))", r.j_lower(su)))
        out.append((f"j_roof(S_u({w}))", r.j_roof(su)))
    for v in data.z_algebra.vertex_names:
        out.append((f"i_embed(S_z({v}))", r.i_embed(simple_module(data.z_algebra, v))))
    return out


# ---------------------------------------------------------------------------
# individual check batteries (shared by `check` and `corpus`)


def checks_validate(spec: AlgebraSpec) -> list[Check]:
    out = []
    try:
        algebra = build_algebra(spec)
    except NonAdmissibleError as e:
        out.append(Check("build", "relations generate an admissible ideal", "FAIL",
                         witness={"error": "NON-ADMISSIBLE", "message": str(e)}))
        return out
    except PossiblyInfiniteError as e:
        out.append(Check("build", "path classes stabilize below the length bound", "FAIL",
                         witness={"error": "POSSIBLY-INFINITE", "message": str(e)}))
        return out
    except AlgebraError as e:
        out.append(Check("build", "construction passes structural validation", "FAIL",
                         witness={"error": "INVALID", "message": str(e)}))
        return out
    rep = validate_algebra(algebra)
    out.append(Check(
        "validate_algebra",
        "unit, associativity, orthogonal idempotents, nilpotent radical ideal, split semisimple quotient",
        "PASS" if rep.ok else "FAIL",
        witness=None if rep.ok else {"issues": list(rep.issues)},
        details={"dimension": algebra.dim, "basis": list(algebra.basis_labels)},
    ))
    if spec.stratification is not None:
        try:
            _strat_of(spec, algebra=algebra, check=True)
            out.append(Check("stratification", "lower sets, layer recollements, stratum independence", "PASS"))
        except (StratificationError, Exception) as e:  # noqa: BLE001
            out.append(Check("stratification", "lower sets, layer recollements, stratum independence",
                             "FAIL", witness={"error": str(e)}))
    if spec.mv is not None:
        try:
            mv_data_from_spec(spec.mv, spec.field)
            out.append(Check("mv", "bimodule axioms, balanced equivariant pairing", "PASS"))
        except Exception as e:  # noqa: BLE001
            out.append(Check("mv", "bimodule axioms, balanced equivariant pairing",
                             "FAIL", witness={"error": str(e)}))
    return out


def checks_recollement(spec: AlgebraSpec) -> list[Check]:
    out = []
    if spec.mv is not None:
        data = mv_data_from_spec(spec.mv, spec.field)
        r = mv_recollement(data)
        rep = verify_recollement(r, _mv_samples(r, data))
        out.append(Check(
            "mv-recollement",
            "adjoint triples, fully faithful embeddings, orthogonality, adjunction exact sequences",
            "PASS" if rep.ok else "FAIL",
            witness=None if rep.ok else {"failures": [(f.axiom, f.subject, f.note) for f in rep.failures()]},
            details={"samples": len(rep.results)},
        ))
        cat = r.extras["mv_category"]
        for w in data.u_algebra.vertex_names:
            su = simple_module(data.u_algebra, w)
            generic = intermediate_extension(r, su).obj
            table = mv_intermediate_table(cat, su)
            ok, _, reason = cat.is_isomorphic(generic, table)
            out.append(Check(
                f"mv-middle-formula({w})",
                "closed-form intermediate extension equals the image of the canonical map",
                "PASS" if ok else "FAIL",
                witness=None if ok else {"reason": reason},
            ))
        return out
    algebra = build_algebra(spec)
    samples = ModuleCategory(algebra).standard_samples()
    for v in algebra.vertex_names:
        r = make_idempotent_recollement(algebra, [v])
        rep = verify_recollement(r, samples)
        out.append(Check(
            f"recollement(e_{v})",
            "adjoint triples, fully faithful embeddings, orthogonality, adjunction exact sequences",
            "PASS" if rep.ok else "FAIL",
            witness=None if rep.ok else {"failures": [(f.axiom, f.subject, f.note) for f in rep.failures()]},
            details={"samples": [n for n, _ in samples], "degenerate": r.degenerate},
        ))
    return out


def checks_simples(spec: AlgebraSpec) -> list[Check]:
    s = _strat_of(spec)
    try:
        table = s.classify_simples()
    except StratificationError as e:
        return [Check("classify_simples", "complete irredundant classification of simples", "FAIL",
                      witness={"error": str(e)})]
    return [Check(
        "classify_simples",
        "every simple is the intermediate extension of a unique stratum simple",
        "PASS",
        details={b: lam for b, (lam, _) in table.items()},
    )]


def checks_porism(spec: AlgebraSpec, oracle: bool | None = None) -> list[Check]:
    s = _strat_of(spec)
    out = []
    for b in s.algebra.vertex_names:
        try:
            res = porism_check(s, b, oracle=oracle)
            out.append(Check(
                f"porism({b})",
                "cover kernel over the standard quotient is filtered by quotients of higher standards",
                "PASS",
                details=res.certificate.summary(),
            ))
        except StratificationError as e:
            out.append(Check(f"porism({b})",
                             "cover kernel over the standard quotient is filtered by quotients of higher standards",
                             "FAIL", witness={"error": str(e)}))
    return out


def checks_synthesis(spec: AlgebraSpec) -> list[Check]:
    s = _strat_of(spec)
    out = []
    for t in s.algebra.vertex_names:
        try:
            res = synthesize_projective_cover(s, t)
            out.append(Check(
                f"synthesize_cover({t})",
                "iterated universal extensions rebuild the projective cover",
                "PASS",
                details={"audit": [
                    {"layer": a.layer, "iterations": a.iterations,
                     "multiplicities": dict(a.multiplicities), "dim": a.dim_after}
                    for a in res.audit
                ]},
            ))
        except Exception as e:  # noqa: BLE001
            out.append(Check(f"synthesize_cover({t})",
                             "iterated universal extensions rebuild the projective cover",
                             "FAIL", witness={"error": str(e)}))
    return out


def checks_eps(spec: AlgebraSpec, oracle: bool | None = None) -> list[Check]:
    s = _strat_of(spec)
    patterns = [s.epsilon] if s.epsilon is not None else sign_patterns(s.poset)
    out = []
    for eps in patterns:
        res = is_epsilon_stratified(s, eps, oracle=oracle)
        label = ",".join(f"{lam}{sign}" for lam, sign in sorted(eps.items()))
        witnesses = {
            "theorem": res.theorem_route.witness,
            "direct-delta": res.direct_delta.witness,
            "direct-nabla": res.direct_nabla.witness,
        }
        if not res.agreement:
            out.append(Check(
                f"eps({label})",
                "homological criterion agrees with both direct filtration searches",
                "FAIL",
                witness={"ROUTE-DISAGREEMENT": {
                    "theorem": res.theorem_route.verdict,
                    "direct-delta": res.direct_delta.verdict,
                    "direct-nabla": res.direct_nabla.verdict,
                    "witnesses": witnesses,
                }},
            ))
        else:
            out.append(Check(
                f"eps({label})",
                "homological criterion agrees with both direct filtration searches",
                "YES" if res.verdict else "NO",
                witness=None if res.verdict else witnesses,
                details={"routes": "3/3 agree"},
            ))
    return out


def checks_hw(spec: AlgebraSpec, oracle: bool | None = None) -> list[Check]:
    s = _strat_of(spec)
    res = is_highest_weight(s.algebra, s.poset, s.rho, oracle=oracle, strat=s)
    if not res.agreement:
        return [Check(
            "highest-weight",
            "structure route and axiom route agree",
            "FAIL",
            witness={"ROUTE-DISAGREEMENT": {
                "structure": res.structure_route.verdict,
                "axioms": res.axiom_route.verdict,
                "witnesses": {"structure": res.structure_route.witness,
                              "axioms": res.axiom_route.witness},
            }},
        )]
    return [Check(
        "highest-weight",
        "one-dimensional strata with a 2-homological stratification; classical axioms",
        "YES" if res.verdict else "NO",
        witness=None if res.verdict else {
            "structure": res.structure_route.witness,
            "axioms": res.axiom_route.witness,
        },
        details={"routes": "2/2 agree"},
    )]


def checks_homological(spec: AlgebraSpec, n: int, deep: bool = False) -> list[Check]:
    s = _strat_of(spec)
    res = is_k_homological(s, n, deep=deep)
    return [Check(
        f"homological(n<={n})",
        "Ext comparison along every layer inclusion is an isomorphism up to the bound",
        "PASS" if res.holds else "FAIL",
        witness=None if res.holds else res.witness,
        details={
            "checked_pairs": res.checked_pairs,
            "note": res.note,
            "comparison_table": [
                {"lower_set": list(row[0]), "stratum": row[1],
                 "object_dims": list(row[2]), "degree": row[3],
                 "dim_source": row[4], "dim_target": row[5], "rank": row[6]}
                for row in res.table
            ],
        },
    )]


MODE_RUNNERS = {
    "recollement": lambda spec, args: checks_recollement(spec),
    "simples": lambda spec, args: checks_simples(spec),
    "porism": lambda spec, args: checks_porism(spec, oracle=args.oracle or None),
    "eps": lambda spec, args: checks_eps(spec, oracle=args.oracle or None),
    "hw": lambda spec, args: checks_hw(spec, oracle=args.oracle or None),
    "homological": lambda spec, args: checks_homological(spec, args.n, deep=args.deep),
}


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    try:
        spec, raw = load_spec(args.path)
    except SpecError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    report = Report(mode="validate", input_name=spec.name,
                    input_sha256=sha256_bytes(raw), seed=args.seed)
    for c in checks_validate(spec):
        report.add(c)
    _emit(report, args)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_check(args) -> int:
    try:
        spec, raw = load_spec(args.path)
    except SpecError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    if args.oracle and spec.field.kind == "Q":
        print("oracle mode requires a finite field; this input is over the rationals",
              file=sys.stderr)
        return EXIT_ORACLE
    report = Report(
        mode=args.mode,
        input_name=spec.name,
        input_sha256=sha256_bytes(raw),
        seed=args.seed,
        options={"mode": args.mode, "n": args.n, "oracle": bool(args.oracle)},
    )
    started = time.monotonic()
    try:
        for c in checks_validate(spec):
            report.add(c)
        if report.ok:
            for c in MODE_RUNNERS[args.mode](spec, args):
                report.add(c)
    except SpecError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    if args.timing:
        report.timing_ms = int((time.monotonic() - started) * 1000)
    _emit(report, args)
    return EXIT_OK if report.ok else EXIT_FAIL


def _corpus_fixture_checks(entry, seed: int) -> list[Check]:
    raw = fixture_bytes(entry.file)
    data = json.loads(raw)
    spec = parse_spec(data, name=entry.name)
    checks: list[Check] = []
    if entry.expect_error is not None:
        expected = {"NON-ADMISSIBLE": NonAdmissibleError,
                    "POSSIBLY-INFINITE": PossiblyInfiniteError}[entry.expect_error]
        try:
            build_algebra(spec)
        except expected:
            return [Check("negative-control", f"build fails with {entry.expect_error}", "PASS")]
        except Exception as e:  # noqa: BLE001
            return [Check("negative-control", f"build fails with {entry.expect_error}", "FAIL",
                          witness={"error": f"unexpected {type(e).__name__}: {e}"})]
        return [Check("negative-control", f"build fails with {entry.expect_error}", "FAIL",
                      witness={"error": "construction unexpectedly succeeded"})]

    checks.extend(checks_validate(spec))
    if any(c.failed for c in checks):
        return checks
    checks.extend(checks_recollement(spec))
    if spec.stratification is not None:
        checks.extend(checks_simples(spec))
        checks.extend(checks_porism(spec))
        checks.extend(checks_synthesis(spec))
        if len(spec.stratification.poset.elements) <= 3:
            checks.extend(checks_eps(spec))
        if "hw" in entry.tags:
            checks.extend(checks_hw(spec))
    return checks


def cmd_corpus(args) -> int:
    entries = [e for e in corpus_index() if args.filter is None or args.filter in e.tags]
    report = Report(
        mode="corpus",
        input_name="bundled-corpus",
        input_sha256=None,
        seed=args.seed,
        options={"filter": args.filter},
    )
    started = time.monotonic()

    def run(entry):
        try:
            return entry.name, _corpus_fixture_checks(entry, args.seed)
        except Exception as e:  # noqa: BLE001
            return entry.name, [Check("pipeline", "fixture pipeline completes", "ERROR",
                                      witness={"error": f"{type(e).__name__}: {e}"})]

    with concurrent.futures.ThreadPoolExecutor(max_workers=min(8, max(1, len(entries)))) as ex:
        results = list(ex.map(run, entries))
    for name, checks in sorted(results, key=lambda t: t[0]):
        for c in checks:
            report.add(Check(f"{name}/{c.name}", c.criterion, c.verdict, c.witness, c.details))
    if args.timing:
        report.timing_ms = int((time.monotonic() - started) * 1000)
    _emit(report, args)
    return EXIT_OK if report.ok else EXIT_FAIL


def _emit(report: Report, args) -> None:
    sys.stdout.write(report.render(args.format))


def _seed_default() -> int:
    env = os.environ.get("STRATAKIT_SEED")
    if env is not None:
        return int(env)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stratakit",
                                description="recollements and stratifications of module categories, exactly")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None,
                        help="PRNG seed recorded in the report (env STRATAKIT_SEED overrides the default)")
        sp.add_argument("--format", choices=["json", "text"], default="json")
        sp.add_argument("--timing", action="store_true",
                        help="include wall-clock timing (breaks byte-for-byte determinism)")

    v = sub.add_parser("validate", help="schema and algebra validation")
    v.add_argument("path")
    common(v)
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("check", help="run one analysis mode on an input file")
    c.add_argument("path")
    c.add_argument("--mode", choices=sorted(MODE_RUNNERS), required=True)
    c.add_argument("--n", type=int, default=4, help="degree bound for --mode homological")
    c.add_argument("--oracle", action="store_true",
                   help="exhaustive filtration search (finite fields only)")
    c.add_argument("--deep", action="store_true",
                   help="re-run the Ext comparison on projectives and injectives, "
                        "not only simples (--mode homological)")
    common(c)
    c.set_defaults(func=cmd_check)

    k = sub.add_parser("corpus", help="run the invariant suite over the bundled fixtures")
    k.add_argument("--filter", default=None, help="only fixtures carrying this tag")
    common(k)
    k.set_defaults(func=cmd_corpus)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is None:
        args.seed = _seed_default()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
