"""Command-line entry point: ``kronspan <group> <verb> [options]``.

Every report is a JSON object ``{command, config, result, meta}``. ``meta``
carries the timestamp, so two runs with the same config differ only there.
Exit codes: 0 ok, 2 usage, 3 budget, 4 verification failed, 5 internal.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from kronspan import basis, bounds, exact_rank, interpolation, secant, tightness, universal
from kronspan.compositions import (
    Composition,
    Support,
    count_compositions,
    enumerate_compositions,
    rank_composition,
    unrank_composition,
    w_support,
)
from kronspan.config import BUDGET_ENV, BudgetExceeded, RunConfig, VerificationFailed, resolve_budget
from kronspan.fields import DEFAULT_PRIME, PrimeField, field_from_tag
from kronspan.kernels import BACKEND
from kronspan.tensor import SparseTensor3, flattening_ranks
from kronspan.tensor_io import TensorFormatError, from_json_obj, read_tensor, to_json_obj, write_tensor

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_VERIFY, EXIT_INTERNAL = 0, 2, 3, 4, 5


class UsageError(ValueError):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- argument helpers ---------------------------------------------------------------


def parse_triples(text: str) -> list[tuple[int, int, int]]:
    out = []
    for part in text.replace(" ", "").split(";"):
        if part:
            vals = tuple(int(x) for x in part.split(","))
            if len(vals) != 3:
                raise UsageError(f"bad triple {part!r}")
            out.append(vals)
    return out


def parse_support(text: str, d: int | None) -> Support:
    """``full`` (needs --d), ``w``, a JSON file, or ``i,j,k;i,j,k;...``."""
    if text == "full":
        if d is None:
            raise UsageError("--support full needs --d")
        return Support.full(d)
    if text == "w":
        return w_support()
    path = Path(text)
    if path.suffix == ".json" and path.exists():
        return Support.from_json(json.loads(path.read_text()))
    triples = parse_triples(text)
    if not triples:
        raise UsageError("empty support")
    return Support(d if d is not None else max(max(t) for t in triples), tuple(triples))


def parse_composition(args) -> Composition:
    """From ``--g 'i,j,k:c;...'`` or from ``--support/--q/--index``."""
    if getattr(args, "g", None):
        mapping = {}
        for part in args.g.replace(" ", "").split(";"):
            if not part:
                continue
            trip, _, count = part.partition(":")
            mapping[tuple(int(x) for x in trip.split(","))] = int(count or 1)
        d = args.d if args.d is not None else max(max(t) for t in mapping)
        sup = parse_support(args.support, d) if getattr(args, "support", None) else Support(d, tuple(mapping))
        return Composition.from_mapping(sup, mapping)
    if getattr(args, "support", None) and args.q is not None and args.index is not None:
        sup = parse_support(args.support, args.d)
        return unrank_composition(sup, args.q, args.index)
    raise UsageError("give --g or --support with --q and --index")


def parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(" ", "").split(",") if x)


def require_seed(cfg: RunConfig) -> int:
    if cfg.seed is None:
        raise UsageError("this command is randomized and needs --seed")
    return cfg.seed


def _field(cfg: RunConfig):
    try:
        return field_from_tag(cfg.field)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _random_tensor(d: int, field, rng: random.Random, support=None) -> SparseTensor3:
    cells = support.triples if support is not None else Support.full(d).triples
    entries = {}
    for t in cells:
        if isinstance(field, PrimeField):
            entries[t] = rng.randrange(1, field.p)
        else:
            entries[t] = field.random(rng) or field.one
    return SparseTensor3((d, d, d), entries, field)


# -- handlers -------------------------------------------------------------------------


def require_options(args, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"{args.group} {args.verb} needs {', '.join(missing)}")


def cmd_compose(args, cfg):
    require_options(args, *{"count": ("q",), "list": ("q",), "rank": ("counts",), "unrank": ("q", "index")}[args.verb])
    sup = parse_support(args.support, args.d)
    if args.verb == "count":
        return {"support_size": len(sup), "q": args.q, "count": count_compositions(len(sup), args.q)}
    if args.verb == "list":
        comps = list(enumerate_compositions(sup, args.q))
        limit = args.limit or len(comps)
        return {"support": sup.to_json(), "q": args.q, "count": len(comps),
                "compositions": [list(g.counts) for g in comps[:limit]]}
    if args.verb == "rank":
        counts = parse_ints(args.counts)
        g = Composition(sup, counts)
        return {"counts": list(counts), "rank": rank_composition(g)}
    if args.verb == "unrank":
        g = unrank_composition(sup, args.q, args.index)
        return {"index": args.index, "counts": list(g.counts)}
    raise UsageError(args.verb)


def cmd_tg(args, cfg):
    g = parse_composition(args)
    field = _field(cfg)
    if args.verb == "build":
        t = basis.build_t_g(g, compressed=args.compressed, field=field, budget=cfg.nnz_budget)
        if cfg.output:
            write_tensor(t, cfg.output)
        out = {"composition": g.to_json(), "dims": list(t.dims), "nnz": t.nnz, "compressed": args.compressed,
               "expected_nnz": basis.orbit_size(g)}
        if not cfg.output:
            out["tensor"] = to_json_obj(t)
        return out
    if args.verb == "entry":
        require_options(args, "I", "J", "K")
        I, J, K = parse_ints(args.I), parse_ints(args.J), parse_ints(args.K)
        return {"composition": g.to_json(), "I": list(I), "J": list(J), "K": list(K), "value": basis.t_g_entry(g, I, J, K)}
    if args.verb == "orbit-check":
        ok = basis.orbit_check(g, budget=cfg.nnz_budget)
        if not ok:
            raise VerificationFailed({"composition": g.to_json(), "single_orbit": False})
        return {"composition": g.to_json(), "single_orbit": True, "orbit_size": basis.orbit_size(g)}
    raise UsageError(args.verb)


def cmd_power(args, cfg):
    seed = require_seed(cfg)
    field = _field(cfg)
    rng = random.Random(seed)
    sup = parse_support(args.support, args.d) if args.support else None
    failures = []
    for trial in range(args.trials):
        s = _random_tensor(args.d, field, rng, sup)
        if not basis.verify_expansion(s, args.q, budget=cfg.nnz_budget):
            failures.append(trial)
    out = {"d": args.d, "q": args.q, "trials": args.trials, "all_passed": not failures, "failed_trials": failures}
    if failures:
        raise VerificationFailed(out)
    return out


def cmd_interpolate(args, cfg):
    field = _field(cfg)
    sup = parse_support(args.support, args.d)
    seed = require_seed(cfg) if args.points == "random" else None
    scheme = interpolation.build_scheme(sup, args.q, field, points=args.points, seed=seed)
    out = {"support": sup.to_json(), "q": args.q, "size": scheme.size, "points": args.points,
           "inverse_denominator": str(scheme.inverse_denominator)}
    if args.index is not None:
        g = scheme.compositions[args.index]
        lam, ok = interpolation.interpolate_t_g(scheme, g, budget=cfg.nnz_budget)
        out.update({"index": args.index, "composition": list(g.counts),
                    "coefficients": [field.format(x) for x in lam], "verified": ok})
    else:
        ok = interpolation.verify_scheme(scheme)
        out["verified_all"] = ok
    if not ok:
        raise VerificationFailed(out)
    return out


def cmd_tight(args, cfg):
    require_options(args, *{"decide": ("support",), "verify": ("support", "cert"), "enumerate": ("d",)}[args.verb])
    if args.verb == "decide":
        sup = parse_support(args.support, args.d)
        res = tightness.decide_tight(sup)
        tight = isinstance(res, tightness.TightnessCertificate)
        return {"support": sup.to_json(), "tight": tight, ("certificate" if tight else "witness"): res.to_json()}
    if args.verb == "verify":
        sup = parse_support(args.support, args.d)
        text = Path(args.cert).read_text() if Path(args.cert).exists() else args.cert
        cert = tightness.TightnessCertificate.from_json(json.loads(text))
        ok = tightness.verify_certificate(sup, cert)
        out = {"support": sup.to_json(), "certificate": cert.to_json(), "valid": ok}
        if not ok:
            raise VerificationFailed(out)
        return out
    if args.verb == "enumerate":
        sups = list(tightness.enumerate_tight_supports(args.d, max_size=args.max_size, mode=args.mode))
        return {"d": args.d, "mode": args.mode, "count": len(sups),
                "supports": [[list(t) for t in s.triples] for s in sups]}
    raise UsageError(args.verb)


def _universal_spec(args) -> universal.UniversalSpec:
    sup = parse_support(args.support, args.d) if args.support else None
    d = args.d if args.d is not None else (sup.d if sup else None)
    if d is None:
        raise UsageError("give --d or --support")
    return universal.UniversalSpec(args.kind, d, args.q, support=sup)


def cmd_universal(args, cfg):
    spec = _universal_spec(args)
    if args.verb == "stats":
        return universal.sequence_stats(spec)
    if args.verb == "build":
        t = universal.build_universal(spec, field=_field(cfg), budget=cfg.nnz_budget)
        if cfg.output:
            write_tensor(t, cfg.output)
        out = {"spec": spec.to_json(), "dims": list(t.dims), "nnz": t.nnz,
               "zero_one": all(v == 1 for v in t.entries.values())}
        if not cfg.output:
            out["tensor"] = to_json_obj(t)
        return out
    if args.verb == "entry":
        table = universal.block_table(spec)
        if args.coord:
            coords = [parse_ints(args.coord)]
        else:
            rng = random.Random(require_seed(cfg))
            coords = [universal.random_coordinate(table, rng) for _ in range(args.random)]
        values = [{"coord": list(c), "value": universal.universal_entry(table, c)} for c in coords]
        return {"spec": spec.to_json(), "dims": list(table.dims), "entries": values}
    raise UsageError(args.verb)


def cmd_mm(args, cfg):
    field = _field(cfg)
    if args.verb == "build":
        if args.support:
            spec = bounds.MMSpec(support=parse_support(args.support, args.d))
        elif args.n:
            spec = bounds.MMSpec(n=args.n)
        else:
            raise UsageError("give --n or --support")
        t = bounds.build_mm(spec, field, cfg.nnz_budget)
        if cfg.output:
            write_tensor(t, cfg.output)
        return {"dims": list(t.dims), "nnz": t.nnz, "flattening_ranks": list(flattening_ranks(t))}
    if args.verb == "degenerate-verify":
        if args.tensor:
            t = read_tensor(args.tensor)
        else:
            rng = random.Random(require_seed(cfg))
            sup = parse_support(args.support, args.d) if args.support else None
            if args.d is None and sup is None:
                raise UsageError("give --tensor, --d or --support")
            t = _random_tensor(args.d or sup.d, field, rng, sup)
        if args.support:
            ok = bounds.verify_support_degeneration(parse_support(args.support, t.dims[0]), t, cfg.nnz_budget)
        else:
            ok = bounds.verify_degeneration(t, cfg.nnz_budget)
        out = {"tensor": to_json_obj(t), "localized": bool(args.support), "degenerates_to_cube": ok}
        if not ok:
            raise VerificationFailed(out)
        return out
    raise UsageError(args.verb)


def cmd_bound(args, cfg):
    if args.verb == "tg":
        table = bounds.MMRankTable()
        for item in args.mm_rank or []:
            n, _, r = item.partition("=")
            table.register(int(n), int(r))
        g = parse_composition(args)
        return bounds.tg_rank_bound(g, table, localized=args.localized).to_json()
    if args.verb == "basis":
        return bounds.asymptotic_bound_from_basis(args.r, args.domain_size, args.q, cfg.precision, d=args.d).to_json()
    if args.verb == "sigma":
        rep = bounds.strassen_sigma_bound(args.omega)
        out = rep.to_json()
        out["exponent_bound"] = float(rep.value)
        return out
    raise UsageError(args.verb)


def cmd_rank(args, cfg):
    t = read_tensor(args.tensor)
    if args.verb == "flatten":
        return {"dims": list(t.dims), "flattening_ranks": list(flattening_ranks(t))}
    if args.verb == "exact":
        res = exact_rank.exact_rank_small(t, cap=args.cap)
        out = res.to_json()
        out["flattening_ranks"] = list(flattening_ranks(t))
        return out
    raise UsageError(args.verb)


def cmd_secant(args, cfg):
    if args.verb == "build":
        n = secant.build_n_matrix(args.d, args.r, args.p, cfg.nnz_budget)
        if args.export:
            n.write(args.export)
        return {"d": args.d, "r": args.r, "p": args.p, "columns": n.shape[1], "occupied_rows": n.shape[0],
                "nominal_rows": str(n.nominal_rows), "nnz": n.nnz, "export": args.export}
    if args.verb == "kernel":
        return secant.decide_equations(args.d, args.r, args.p, cfg.nnz_budget, cfg.precision).to_json()
    if args.verb == "bound":
        if args.assume:
            return secant.absence_bound(args.d, args.n, args.p, 0, assumed=True, digits=cfg.precision).to_json()
        return _verified_absence(args, cfg)
    if args.verb == "greedy":
        field = _field(cfg)
        seed = require_seed(cfg)
        if args.subspace:
            obj = json.loads(Path(args.subspace).read_text())
            base = [from_json_obj(t) for t in obj["basis"]]
            samples = [(from_json_obj(s["tensor"]), int(s["rank"])) for s in obj["samples"]]
            return secant.greedy_span_subspace(base, samples, args.p).to_json(cfg.precision)
        res = secant.greedy_span(args.d, args.p, secant.RankSampler(args.d, field, seed), max_rank=args.max_rank,
                                 patience=args.patience, max_samples=args.max_samples)
        return res.to_json(cfg.precision)
    raise UsageError(args.verb)


def _verified_absence(args, cfg):
    verdict = secant.decide_equations(args.d, args.n, args.p, cfg.nnz_budget, cfg.precision)
    if verdict.kernel_dimension:
        raise VerificationFailed(verdict.to_json())
    return verdict.bound.to_json()


def cmd_batch(args, cfg):
    items = json.loads(Path(args.run_file).read_text())
    if isinstance(items, dict):
        items = items.get("items", [])
    argvs = [it["argv"] if isinstance(it, dict) else it for it in items]

    def run(argv):
        code, report = dispatch(list(argv))
        return {"argv": list(argv), "exit_code": code, "passed": code == 0, "report": report}

    workers = max(1, args.workers)
    if workers == 1:
        results = [run(a) for a in argvs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, argvs))
    failed = [i for i, r in enumerate(results) if not r["passed"]]
    out = {"items": results, "count": len(results), "passed": not failed, "failed_items": failed}
    if failed:
        raise VerificationFailed(out)
    return out


HANDLERS = {
    "compose": cmd_compose,
    "tg": cmd_tg,
    "power": cmd_power,
    "interpolate": cmd_interpolate,
    "tight": cmd_tight,
    "universal": cmd_universal,
    "mm": cmd_mm,
    "bound": cmd_bound,
    "rank": cmd_rank,
    "secant": cmd_secant,
    "batch": cmd_batch,
}


# -- parser ---------------------------------------------------------------------------


def _globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--field", default=default(str(DEFAULT_PRIME)), help="prime modulus or Q")
    p.add_argument("--seed", type=int, default=default(None))
    p.add_argument("--budget", type=int, default=default(None), help=f"nonzero budget (env {BUDGET_ENV})")
    p.add_argument("--precision", type=int, default=default(30), help="decimal digits for certified reals")
    p.add_argument("--output", default=default(None))
    p.add_argument("--format", choices=("json", "text"), default=default("json"))


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="kronspan", description=__doc__.splitlines()[0])
    _globals(parser, suppress=False)
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_ArgumentParser)

    def verb(sub, name):
        p = sub.add_parser(name)
        _globals(p, suppress=True)
        return p

    def comp_args(p):
        p.add_argument("--g", help="composition as 'i,j,k:c;...'")
        p.add_argument("--support")
        p.add_argument("--d", type=int)
        p.add_argument("--q", type=int)
        p.add_argument("--index", type=int)

    g = groups.add_parser("compose").add_subparsers(dest="verb", required=True, parser_class=_ArgumentParser)
    for name in ("list", "count", "rank", "unrank"):
        p = verb(g, name)
        p.add_argument("--support", default="full")
        p.add_argument("--d", type=int)
        p.add_argument("--q", type=int)
        p.add_argument("--counts")
        p.add_argument("--index", type=int)
        p.add_argument("--limit", type=int)

    g = groups.add_parser("tg").add_subparsers(dest="verb", required=True, parser_class=_ArgumentParser)
    for name in ("build", "entry", "orbit-check"):
        p = verb(g, name)
        comp_args(p)
        p.add_argument("--compressed", action="store_true")
        p.add_argument("--I")
        p.add_argument("--J")
        p.add_argument("--K")

    g = groups.add_parser("power").add_subparsers(dest="verb", required=True, parser_class=_ArgumentParser)
    p = verb(g, "verify")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--support")

    p = groups.add_parser("interpolate")
    _globals(p, suppress=True)
    p.add_argument("--support", required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--index", type=int, help="composition rank of g; all g when omitted")
    p.add_argument("--points", choices=("lattice", "random"), default="lattice")

    g = groups.add_parser("tight").add_subparsers(dest="verb", required=True, parser_class=_ArgumentParser)
    for name in ("decide", "verify", "enumerate"):
        p = verb(g, name)
        p.add_argument("--support")
        p.add_argument("--d", type=int)
        p.add_argument("--cert")
        p.add_argument("--max-size", type=int)
        p.add_argument("--mode", choices=("exhaustive", "maximal"), default="exhaustive")

    g = groups.add_parser("universal").add_subparsers(dest="verb", required=True, parser_class=_ArgumentParser)
    for name in ("build", "entry", "stats"):
        p = verb(g, name)
        p.add_argument("--kind", choices=universal.KINDS, required=True)
        p.add_argument("--d", type=int)
        p.add_argument("--q", type=int)
        p.add_argument("--support")
        p.add_argument("--coord")
        p.add_argument("--random", type=int, default=10)

    g = groups.add_parser("mm").add_subparsers(dest="verb", required=True, parser_class=_ArgumentParser)
    for name in ("build", "degenerate-verify"):
        p = verb(g, name)
        p.add_argument("--n", type=int)
        p.add_argument("--d", type=int)
        p.add_argument("--support")
        p.add_argument("--tensor")

    g = groups.add_parser("bound").add_subparsers(dest="verb", required=True, parser_class=_ArgumentParser)
    p = verb(g, "tg")
    comp_args(p)
    p.add_argument("--localized", action="store_true")
    p.add_argument("--mm-rank", action="append", help="register R(MM_n) <= r as n=r")
    p = verb(g, "basis")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--domain-size", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int)
    p = verb(g, "sigma")
    p.add_argument("--omega", default=str(bounds.DEFAULT_OMEGA))

    g = groups.add_parser("rank").add_subparsers(dest="verb", required=True, parser_class=_ArgumentParser)
    for name in ("exact", "flatten"):
        p = verb(g, name)
        p.add_argument("--tensor", required=True)
        p.add_argument("--cap", type=int, default=exact_rank.MAX_CAP)

    g = groups.add_parser("secant").add_subparsers(dest="verb", required=True, parser_class=_ArgumentParser)
    for name in ("build", "kernel", "bound", "greedy"):
        p = verb(g, name)
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--r", type=int, default=1)
        p.add_argument("--n", type=int, default=1)
        p.add_argument("--export")
        p.add_argument("--assume", action="store_true", help="take the absence of equations as given")
        p.add_argument("--max-rank", type=int, default=1)
        p.add_argument("--patience", type=int, default=8)
        p.add_argument("--max-samples", type=int, default=100_000)
        p.add_argument("--subspace")

    p = groups.add_parser("batch")
    _globals(p, suppress=True)
    p.add_argument("run_file")
    p.add_argument("--workers", type=int, default=1)
    return parser


# -- dispatch -----------------------------------------------------------------------


def _render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(f"{pad}- {json.dumps(x, sort_keys=True)}" for x in obj)
    return f"{pad}{obj}"


def render(report: dict, fmt: str) -> str:
    if fmt == "text":
        return _render_text(report)
    return json.dumps(report, sort_keys=True, indent=2)


def dispatch(argv: list[str]) -> tuple[int, dict]:
    """Run one command; returns the exit code and the report without printing."""
    started = time.time()
    cfg = RunConfig()
    command = " ".join(argv[:2])
    try:
        args = build_parser().parse_args(argv)
        command = args.group + (f" {args.verb}" if getattr(args, "verb", None) else "")
        cfg = RunConfig(field=str(args.field), seed=args.seed, nnz_budget=resolve_budget(args.budget),
                        precision=args.precision, output=args.output, format=args.format)
        result = HANDLERS[args.group](args, cfg)
        code, body = EXIT_OK, {"result": result}
    except UsageError as exc:
        code, body = EXIT_USAGE, {"error": {"kind": "usage", "message": str(exc)}}
    except BudgetExceeded as exc:
        code, body = EXIT_BUDGET, {"error": {"kind": "budget", "message": str(exc)}}
    except VerificationFailed as exc:
        detail = exc.args[0] if exc.args else None
        code, body = EXIT_VERIFY, {"error": {"kind": "verification-failed"}, "result": detail}
    except (ValueError, TensorFormatError, FileNotFoundError, IndexError, KeyError) as exc:
        code, body = EXIT_USAGE, {"error": {"kind": "usage", "message": f"{type(exc).__name__}: {exc}"}}
    except Exception as exc:  # noqa: BLE001 - reported as an internal failure
        code, body = EXIT_INTERNAL, {"error": {"kind": "internal", "message": f"{type(exc).__name__}: {exc}"}}
    report = {"command": command, "config": cfg.to_dict(), **body,
              "meta": {"timestamp": started, "elapsed_s": round(time.time() - started, 6), "backend": BACKEND}}
    report["exit_code"] = code
    return code, report


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    code, report = dispatch(argv)
    fmt = report["config"].get("format", "json")
    text = render(report, fmt)
    out = report["config"].get("output")
    group = report["command"].split(" ")[0]
    # tensor-writing verbs use --output for the tensor itself
    if out and group not in ("tg", "universal", "mm"):
        Path(out).write_text(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
