"""Command-line pipeline orchestration.

Commands: ingest-check, analyze, vectors, cluster, compare, synth.
Every run writes its artifacts atomically plus a run_manifest.json
recording inputs, seeds, and output paths.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from .models import (
    DataError,
    Granularity,
    RegionSelector,
    ingest_checkins,
    ingest_index_table,
    load_bundled_index,
    write_checkins,
)
from .filtering import FilterConfig, apply_filters
from .popularity import AnalysisMode, popularity_table, write_popularity_csv
from .nullmodel import (
    NullMethod,
    NullModelConfig,
    run_null_model_batch,
    write_null_distribution_csv,
)
from .preference import (
    build_preference_vector,
    collect_global_dims,
    read_vectors_csv,
    write_vectors_csv,
)
from .clustering import cluster_regions
from .comparison import compare_with_index, random_baseline, write_comparison_csv
from .synth import SynthSpec, generate


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Manifest:
    def __init__(self, command: str, args: argparse.Namespace, out_dir: Path):
        self.out_dir = out_dir
        self.data = {
            "command": command,
            "config": {k: v for k, v in sorted(vars(args).items())
                       if k != "func" and not k.startswith("_")},
            "inputs": {},
            "seeds": {},
            "artifacts": [],
            "started_at": datetime.now(timezone.utc).isoformat(),
        }

    def add_input(self, path: Path) -> None:
        self.data["inputs"][str(path)] = _sha256(path)

    def add_seed(self, stage: str, seed: int) -> None:
        self.data["seeds"][stage] = seed

    def write_artifact(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        _atomic_write_text(path, text)
        self.data["artifacts"].append(str(path))
        return path

    def finish(self) -> None:
        self.data["finished_at"] = datetime.now(timezone.utc).isoformat()
        _atomic_write_text(self.out_dir / "run_manifest.json",
                           json.dumps(self.data, indent=2, default=str) + "\n")


def _json_default(obj):
    import numpy as np

    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _out_dir(args) -> Path:
    if args.out_dir:
        return Path(args.out_dir)
    env = os.environ.get("VENUEPREF_OUT_DIR")
    return Path(env) if env else Path(".")


def _load_config_file(args: argparse.Namespace, argv: list[str]) -> None:
    # config file supplies values for flags not given on the command line
    if not getattr(args, "config", None):
        return
    with open(args.config, encoding="utf-8") as fh:
        config = json.load(fh)
    for key, value in config.items():
        attr = key.replace("-", "_")
        flag = "--" + key.replace("_", "-")
        if hasattr(args, attr) and flag not in argv:
            setattr(args, attr, value)


def _filter_config(args) -> FilterConfig:
    categories = frozenset(c.strip() for c in args.categories.split(",")) \
        if args.categories else FilterConfig().allowed_categories
    return FilterConfig(
        min_checkins_per_venue=args.min_checkins_per_venue,
        dedupe_user_venue=not args.no_dedupe,
        allowed_categories=categories,
        min_venues_per_subcategory=args.min_venues_per_subcategory,
        max_checkins_per_region=args.max_checkins_per_region,
        rng_seed=args.seed,
    )


def _region_from_args(args) -> RegionSelector:
    if args.country and args.city:
        raise DataError("pass either --country or --city, not both")
    if args.country:
        return RegionSelector(Granularity.COUNTRY, args.country)
    if args.city:
        return RegionSelector(Granularity.CITY, args.city)
    raise DataError("a region is required: pass --country or --city")


def _read_input(args):
    path = Path(args.input)
    with open(path, "rb") as fh:
        records, report = ingest_checkins(fh, args.format)
    return path, records, report


def cmd_ingest_check(args) -> int:
    _, records, report = _read_input(args)
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def cmd_analyze(args) -> int:
    out_dir = _out_dir(args)
    manifest = Manifest("analyze", args, out_dir)
    path, records, _ = _read_input(args)
    manifest.add_input(path)
    manifest.add_seed("filter", args.seed)
    manifest.add_seed("null_model", args.seed)

    region = _region_from_args(args)
    mode = AnalysisMode(args.mode)
    if mode is AnalysisMode.VENUE_WITHIN_SUBCATEGORY and not args.subcategory:
        raise DataError("--subcategory is required for mode venue_within_subcategory")
    scope_subcategory = args.subcategory if mode is AnalysisMode.VENUE_WITHIN_SUBCATEGORY else None

    filtered, filter_report = apply_filters(records, region, _filter_config(args))
    manifest.write_artifact("filter_report.json",
                            json.dumps(filter_report.as_dict(), indent=2) + "\n")

    rows = popularity_table(filtered, mode, region, scope_subcategory)
    buf = io.StringIO()
    write_popularity_csv(rows, buf)
    manifest.write_artifact("popularity.csv", buf.getvalue())

    config = NullModelConfig(k=args.k, confidence=args.confidence,
                             method=NullMethod(args.method), rng_seed=args.seed)
    results = run_null_model_batch(filtered, mode, region, config,
                                   scope_subcategory)
    manifest.write_artifact(
        "significance.json",
        json.dumps([r.as_dict() for r in results], indent=2,
                   default=_json_default) + "\n")
    buf = io.StringIO()
    write_null_distribution_csv(results, buf)
    manifest.write_artifact("null_distribution.csv", buf.getvalue())

    manifest.finish()
    return 0


def cmd_vectors(args) -> int:
    out_dir = _out_dir(args)
    manifest = Manifest("vectors", args, out_dir)
    path, records, _ = _read_input(args)
    manifest.add_input(path)
    manifest.add_seed("filter", args.seed)

    granularity = Granularity(args.granularity)
    if args.regions:
        names = [n.strip() for n in args.regions.split(",")]
    else:
        names = sorted({
            (rec.country if granularity is Granularity.COUNTRY else rec.city)
            for rec in records
        } - {None})
    if not names:
        raise DataError("no regions found in the input")

    config = _filter_config(args)
    filtered_by_region = {}
    for name in names:
        region = RegionSelector(granularity, name)
        filtered, _ = apply_filters(records, region, config)
        filtered_by_region[name] = (region, filtered)

    pooled = [rec for _, recs in filtered_by_region.values() for rec in recs]
    dims = collect_global_dims(pooled, [region for region, _ in
                                        filtered_by_region.values()])
    vectors = [build_preference_vector(recs, region, dims)
               for region, recs in filtered_by_region.values()]

    buf = io.StringIO()
    write_vectors_csv(vectors, buf)
    manifest.write_artifact("vectors.csv", buf.getvalue())
    manifest.write_artifact("vectors_manifest.json", json.dumps({
        "granularity": granularity.value,
        "regions": names,
        "dims": dims,
        "source": str(path),
        "source_sha256": _sha256(path),
        "filter_seed": args.seed,
    }, indent=2) + "\n")
    manifest.finish()
    return 0


def _load_vectors(path_arg: str, granularity: str):
    path = Path(path_arg)
    if path.is_dir():
        path = path / "vectors.csv"
    with open(path, encoding="utf-8", newline="") as fh:
        return path, read_vectors_csv(fh, granularity)


def cmd_cluster(args) -> int:
    out_dir = _out_dir(args)
    manifest = Manifest("cluster", args, out_dir)
    path, vectors = _load_vectors(args.vectors, args.granularity)
    manifest.add_input(path)
    manifest.add_seed("kmeans", args.seed)
    result = cluster_regions(list(vectors.values()), k=args.k, seed=args.seed,
                             max_iter=args.max_iter, restarts=args.restarts)
    manifest.write_artifact(
        "clusters.json",
        json.dumps(result.as_dict(), indent=2, default=_json_default) + "\n")
    manifest.finish()
    return 0


def _load_index(args):
    if args.index in ("GII", "HDI"):
        return load_bundled_index(args.index)
    path = Path(args.index)
    name = args.index_name or path.stem.upper()
    with open(path, "rb") as fh:
        return ingest_index_table(fh, index_name=name)


def cmd_compare(args) -> int:
    out_dir = _out_dir(args)
    manifest = Manifest("compare", args, out_dir)
    path, vectors = _load_vectors(args.vectors, args.granularity)
    manifest.add_input(path)
    manifest.add_seed("baseline", args.seed)
    index = _load_index(args)

    if args.all_anchors:
        anchors = sorted(vectors)
    elif args.anchor:
        anchors = [args.anchor]
    else:
        raise DataError("pass --anchor NAME or --all-anchors")

    rows = []
    for anchor in anchors:
        comp = compare_with_index(vectors, index, anchor)
        base = random_baseline(vectors, index, anchor,
                               n_permutations=args.permutations, seed=args.seed)
        rows.append((comp, base))
    buf = io.StringIO()
    write_comparison_csv(rows, buf)
    manifest.write_artifact("comparison.csv", buf.getvalue())
    manifest.finish()
    return 0


def cmd_synth(args) -> int:
    out_dir = _out_dir(args)
    manifest = Manifest("synth", args, out_dir)
    spec_path = Path(args.spec)
    manifest.add_input(spec_path)
    spec = SynthSpec.from_json(spec_path.read_text(encoding="utf-8"))
    manifest.add_seed("synth", spec.rng_seed)
    records = generate(spec)
    buf = io.StringIO()
    write_checkins(records, buf, fmt=args.format)
    name = args.out or f"synth.{args.format}"
    manifest.write_artifact(name, buf.getvalue())
    manifest.finish()
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for every stochastic stage")
    parser.add_argument("--config", help="JSON config file; flags win on conflict")
    parser.add_argument("--out-dir", default=None,
                        help="output directory (default: $VENUEPREF_OUT_DIR or .)")


def _add_input(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="check-in data file")
    parser.add_argument("--format", choices=["csv", "jsonl"], default="csv")


def _add_filter_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--min-checkins-per-venue", type=int, default=5)
    parser.add_argument("--no-dedupe", action="store_true",
                        help="keep multiple check-ins per user per venue")
    parser.add_argument("--categories", default=None,
                        help="comma-separated category whitelist")
    parser.add_argument("--min-venues-per-subcategory", type=int, default=2)
    parser.add_argument("--max-checkins-per-region", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="venuepref",
        description="Cross-gender venue-preference analytics for check-in data")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("ingest-check", help="validate an input file and print "
                                            "the ingest report")
    _add_input(p)
    _add_common(p)
    p.set_defaults(func=cmd_ingest_check)

    p = sub.add_parser("analyze", help="popularity table and null-model "
                                       "significance for one region")
    _add_input(p)
    p.add_argument("--country")
    p.add_argument("--city")
    p.add_argument("--mode", choices=[m.value for m in AnalysisMode],
                   default="subcategory")
    p.add_argument("--subcategory", help="scope subcategory for "
                                         "venue_within_subcategory mode")
    p.add_argument("--k", type=int, default=100, help="null-model replicates")
    p.add_argument("--confidence", type=float, default=0.99)
    p.add_argument("--method", choices=[m.value for m in NullMethod],
                   default="generative")
    _add_filter_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("vectors", help="build per-region preference vectors")
    _add_input(p)
    p.add_argument("--granularity", choices=["country", "city"],
                   default="country")
    p.add_argument("--regions", help="comma-separated region names "
                                     "(default: all in the input)")
    _add_filter_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_vectors)

    p = sub.add_parser("cluster", help="spherical k-means over preference vectors")
    p.add_argument("--vectors", required=True,
                   help="vectors.csv or a directory containing it")
    p.add_argument("--granularity", choices=["country", "city"],
                   default="country")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--restarts", type=int, default=1,
                   help="restarts; best inertia wins")
    _add_common(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("compare", help="rank comparison against a scalar index")
    p.add_argument("--vectors", required=True)
    p.add_argument("--granularity", choices=["country", "city"],
                   default="country")
    p.add_argument("--index", required=True,
                   help="'GII', 'HDI' (bundled 2014 tables) or a "
                        "country,value CSV path")
    p.add_argument("--index-name", help="name for a custom index file")
    p.add_argument("--anchor", help="anchor region")
    p.add_argument("--all-anchors", action="store_true")
    p.add_argument("--permutations", type=int, default=100)
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("synth", help="generate a synthetic check-in dataset")
    p.add_argument("--spec", required=True, help="SynthSpec JSON file")
    p.add_argument("--out", help="output file name (within --out-dir)")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(argv)
    try:
        _load_config_file(args, list(argv))
        return args.func(args)
    except (DataError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
