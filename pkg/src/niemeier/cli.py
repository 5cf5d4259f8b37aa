"""Command-line interface.

Exit codes: 0 success (witness found), 10 proven absent, 11 invalid witness,
1 usage or input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .catalog import CatalogError, by_name
from .embed import (EmbedStats, WitnessError, embed_search, read_witness, verify_witness,
                    witness_to_document)
from .isometry import automorphism_group
from .lattice import (IntegerLattice, LatticeError, dumps_document, is_even, is_unimodular,
                      read_lattice, to_document, write_lattice)
from .mass import MassFormulaError
from .neighbors import (GenusRecord, MassOvershootError, NeighborError, format_type, genus_enumerate,
                        genus_report_lines, make_record, mass_check, type_of)
from .roots import root_decomposition

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL, EXIT_ABSENT, EXIT_INVALID = 0, 1, 2, 10, 11

log = logging.getLogger("niemeier")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    prune_depth: int = 2
    workers: int = 1
    max_classes: int | None = None
    fmt: str = "text"

    def __post_init__(self):
        if self.workers < 1:
            raise UsageError("--workers must be at least 1")
        if self.prune_depth not in (0, 1, 2):
            raise UsageError("--prune-depth must be 0, 1 or 2")


def _pq(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _emit(fields: dict, fmt: str) -> None:
    if fmt == "structured":
        print(json.dumps(fields, ensure_ascii=False))
    else:
        for k, v in fields.items():
            print(f"{k}: {v}")


def _load(path: str) -> IntegerLattice:
    try:
        return read_lattice(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


# ------------------------------------------------------------------ commands

def cmd_construct(args) -> int:
    L = by_name(args.name)
    if args.output:
        write_lattice(L, args.output)
    else:
        sys.stdout.write(dumps_document(to_document(L)))
    return EXIT_OK


def analyze(L: IntegerLattice) -> dict:
    from .reduction import minimum_norm
    out = {
        "name": L.name,
        "rank": L.rank,
        "determinant": L.determinant,
        "parity": "even" if is_even(L) else "odd",
        "minimum": minimum_norm(L),
        "aut_order": str(automorphism_group(L).order),
        "roots": str(root_decomposition(L)),
    }
    if is_unimodular(L) and not is_even(L) and L.rank % 8 == 0:
        out["type"] = format_type(type_of(L))
    return out


def cmd_analyze(args) -> int:
    _emit(analyze(_load(args.lattice)), args.format)
    return EXIT_OK


def _checkpoint_writer(directory: Path, fmt: str):
    (directory / "lattices").mkdir(parents=True, exist_ok=True)
    state_path = directory / "classes.json"
    state = json.loads(state_path.read_text()) if state_path.exists() else []

    def on_new(rec: GenusRecord) -> None:
        write_lattice(rec.lattice, directory / "lattices" / f"{rec.name}.json")
        state.append({"name": rec.name, "aut_order": str(rec.aut_order)})
        state_path.write_text(json.dumps(state, indent=1) + "\n")

    return on_new, state


def _load_checkpoint(directory: Path) -> list[GenusRecord]:
    state_path = directory / "classes.json"
    if not state_path.exists():
        return []
    out = []
    for entry in json.loads(state_path.read_text()):
        L = read_lattice(directory / "lattices" / f"{entry['name']}.json")
        out.append(make_record(L, entry["name"], int(entry["aut_order"])))
    return out


def cmd_genus(args) -> int:
    cfg = RunConfig("genus", workers=args.workers, max_classes=args.max_classes, fmt=args.format)
    seed = _load(args.seed)
    if not is_unimodular(seed):
        raise UsageError("the seed lattice must be unimodular")
    on_new, known = None, []
    if args.checkpoint:
        directory = Path(args.checkpoint)
        known = _load_checkpoint(directory)
        on_new, _ = _checkpoint_writer(directory, cfg.fmt)
    records = genus_enumerate(seed, cfg.max_classes, workers=cfg.workers, on_new=on_new, known=known)
    records = [r.with_type() for r in records]
    lines = genus_report_lines(records, cfg.fmt)
    print("\n".join(lines))
    if args.checkpoint:
        (Path(args.checkpoint) / "report.txt").write_text("\n".join(genus_report_lines(records)) + "\n")
    if args.mass_check and not mass_check(records).passed:
        log.error("mass check failed")
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_embed(args) -> int:
    cfg = RunConfig("embed", prune_depth=args.prune_depth, fmt=args.format)
    N = _load(args.lattice)
    stats = EmbedStats()
    W = embed_search(N, cfg.prune_depth, stats)
    fields = {
        "lattice": N.name,
        "prune_depth": cfg.prune_depth,
        "found": W is not None,
        "level0_candidates": stats.level0_candidates,
        "h_branches": stats.level0_branches,
        "alpha1_branches": stats.level1_branches,
        "alpha2_branches": stats.level2_branches,
        "clique_nodes": stats.clique_nodes,
    }
    if W is not None:
        if not verify_witness(N, W):
            return EXIT_INTERNAL
        fields["witness"] = [list(v) for v in W.vectors]
        if args.witness_out:
            Path(args.witness_out).write_text(dumps_document(witness_to_document(N, W)))
    _emit(fields, cfg.fmt)
    return EXIT_OK if W is not None else EXIT_ABSENT


def cmd_verify(args) -> int:
    N = _load(args.lattice)
    try:
        W, doc = read_witness(args.witness)
    except WitnessError as exc:
        print(f"invalid witness: {exc}", file=sys.stderr)
        return EXIT_INVALID
    ok = verify_witness(N, W)
    if ok and doc.get("host_hash") and doc["host_hash"] != N.fingerprint_hash():
        print("witness was produced for a different host lattice", file=sys.stderr)
        ok = False
    if ok and "gram" in doc:
        from .embed import witness_gram
        ok = doc["gram"] == witness_gram(N, W.vectors)
    print("valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_INVALID


def _embed_job(args):
    path, depth = args
    N = read_lattice(path)
    W = embed_search(N, depth)
    return W is not None, None if W is None else [list(v) for v in W.vectors]


def cmd_theorem1(args) -> int:
    cfg = RunConfig("theorem1", prune_depth=args.prune_depth, workers=args.workers, fmt=args.format)
    directory = Path(args.directory)
    state_path = directory / "classes.json"
    if not state_path.exists():
        raise UsageError(f"{directory} has no classes.json; run 'genus --checkpoint' first")
    entries = json.loads(state_path.read_text())
    missing = [e["name"] for e in entries if not (directory / "lattices" / f"{e['name']}.json").exists()]
    if missing:
        raise UsageError("missing lattice files for classes: " + ", ".join(missing))
    records = _load_checkpoint(directory)
    report = mass_check(records)
    if not report.passed:
        raise UsageError(f"genus run incomplete: mass {_pq(report.total)} of {_pq(report.target)}")
    results_path = directory / "embed.json"
    results = json.loads(results_path.read_text()) if results_path.exists() else {}
    todo = [r for r in records if r.name not in results]
    jobs = [(str(directory / "lattices" / f"{r.name}.json"), cfg.prune_depth) for r in todo]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            outs = list(pool.map(_embed_job, jobs))
    else:
        outs = [_embed_job(j) for j in jobs]
    for r, (found, wit) in zip(todo, outs):
        results[r.name] = {"found": found, "witness": wit}
    results_path.write_text(json.dumps(results, indent=1) + "\n")
    rows = {}
    for r in records:
        row = rows.setdefault(r.minimum, {"classes": 0, "witness": 0, "exceptions": []})
        row["classes"] += 1
        if results[r.name]["found"]:
            row["witness"] += 1
        else:
            label = format_type(type_of(r.lattice)) if r.parity == "odd" and r.lattice.rank % 8 == 0 else r.root_label
            row["exceptions"].append(label)
    total = sum(v["witness"] for v in rows.values())
    for mu in sorted(rows):
        row = rows[mu]
        exc = sorted(row["exceptions"])
        if cfg.fmt == "structured":
            print(json.dumps({"minimum": mu, "classes": row["classes"], "with_witness": row["witness"],
                              "exceptions": exc}, ensure_ascii=False))
        else:
            print(f"min {mu}: {row['classes']} classes, {row['witness']} with L+, exceptions: "
                  + (", ".join(exc) if exc else "-"))
    if cfg.fmt == "structured":
        print(json.dumps({"classes": len(records), "with_witness": total}))
    else:
        print(f"total: {len(records)} classes, {total} with L+")
    return EXIT_OK


# ---------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "structured"), default="text")
    ap = argparse.ArgumentParser(prog="niemeier", description="Exact lattice toolkit for odd unimodular lattices.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="write a catalog lattice", parents=[fmt])
    p.add_argument("name")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("analyze", help="invariants of a lattice file", parents=[fmt])
    p.add_argument("lattice")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("genus", help="enumerate a unimodular genus", parents=[fmt])
    p.add_argument("seed")
    p.add_argument("--mass-check", action="store_true")
    p.add_argument("--max-classes", type=int)
    p.add_argument("--checkpoint")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_genus)

    p = sub.add_parser("embed", help="search for L+ in a lattice", parents=[fmt])
    p.add_argument("lattice")
    p.add_argument("--prune-depth", type=int, choices=(0, 1, 2), default=2)
    p.add_argument("--witness-out")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("verify", help="check an L+ witness", parents=[fmt])
    p.add_argument("lattice")
    p.add_argument("witness")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("theorem1", help="summarise embed results over a genus run", parents=[fmt])
    p.add_argument("directory")
    p.add_argument("--prune-depth", type=int, choices=(0, 1, 2), default=2)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_theorem1)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, LatticeError, CatalogError, WitnessError, NeighborError, MassFormulaError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except MassOvershootError as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
