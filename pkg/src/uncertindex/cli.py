"""Command line front end: ``lexicon``, ``index``, ``causality`` and ``pipeline``."""

from __future__ import annotations

import argparse
import configparser
import glob
import hashlib
import json
import logging
import os
import platform
import sys
import warnings
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy

from . import __version__
from .corpus import DailyCounter, aggregate_monthly, parse_articles, standardize
from .embedding import (
    Lexicon,
    build_lexicon,
    parse_embedding_file,
    scan_file,
    scan_table,
    write_profile_csv,
)
from .errors import ConfigError, UncertIndexError
from .granger import TYConfig, causality_matrix
from .series import align, parse_month, read_series_csv, split_ranges, write_series_csv

logger = logging.getLogger("uncertindex")

CONFIG_ENV = "UNCERTINDEX_CONFIG"


@dataclass
class LexiconOptions:
    embeddings: Path
    seed: str = "uncertainty"
    k: int = 4
    out: Path = Path("lexicon.txt")
    profile: int = 0
    profile_out: Path = Path("profile.csv")
    in_memory: bool = False


@dataclass
class IndexOptions:
    articles: list[str]
    lexicon: Path
    out: Path = Path("uncert.csv")
    label: str = "UNCERT"
    weighting: str = "count"
    lenient: bool = False
    standardize: bool = False
    standardized_out: Path | None = None


@dataclass
class CausalityOptions:
    series: list[tuple[str, Path]]
    out_dir: Path = Path("causality")
    start: str | None = None
    end: str | None = None
    split: list[str] = field(default_factory=list)
    workers: int = 1
    ty: TYConfig = field(default_factory=TYConfig)


def sha256_file(path: str | os.PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# ---------------------------------------------------------------- stages


def run_lexicon(opts: LexiconOptions) -> list[Path]:
    seed = opts.seed.lower()
    if not Path(opts.embeddings).is_file():
        raise ConfigError(f"embedding file not found: {opts.embeddings}")
    if opts.in_memory:
        scan = scan_table(parse_embedding_file(opts.embeddings), seed)
    else:
        scan = scan_file(opts.embeddings, seed)
    lexicon = build_lexicon(scan, seed, opts.k)
    Path(opts.out).parent.mkdir(parents=True, exist_ok=True)
    lexicon.save(opts.out)
    written = [Path(opts.out)]
    stats = scan.stats()
    print(
        f"lexicon: {' '.join(lexicon.words)}\n"
        f"distances from {seed!r} over {len(scan)} tokens: "
        f"nearest {stats['min_nonself']:.4f}, max {stats['max']:.4f}, "
        f"median {stats['median']:.4f}, sd {stats['stddev']:.4f}"
    )
    if opts.profile:
        Path(opts.profile_out).parent.mkdir(parents=True, exist_ok=True)
        write_profile_csv(scan.nearest(opts.profile), opts.profile_out)
        written.append(Path(opts.profile_out))
    return written


def _expand_articles(patterns: Sequence[str]) -> list[str]:
    paths: list[str] = []
    for pat in patterns:
        hits = sorted(glob.glob(pat))
        if not hits:
            raise ConfigError(f"no article files match {pat!r}")
        paths.extend(h for h in hits if h not in paths)
    return paths


def run_index(opts: IndexOptions) -> list[Path]:
    lexicon = Lexicon.load(opts.lexicon)
    counter = DailyCounter(lexicon)
    processed = skipped = 0
    for path in _expand_articles(opts.articles):
        reader = parse_articles(path, strict=not opts.lenient)
        counter.update(reader)
        processed += reader.count
        skipped += reader.skipped
        if reader.skipped:
            logger.warning("%s: skipped %d malformed lines", path, reader.skipped)
    daily = counter.counts()
    if not daily:
        raise UncertIndexError("corpus contains no articles")
    series = aggregate_monthly(daily, label=opts.label, weighting=opts.weighting)
    Path(opts.out).parent.mkdir(parents=True, exist_ok=True)
    write_series_csv(series, opts.out)
    written = [Path(opts.out)]
    msg = f"articles processed: {processed}; months: {len(series)}"
    if skipped:
        msg += f"; skipped lines: {skipped}"
    print(msg)
    if opts.standardize:
        target = opts.standardized_out or Path(opts.out).with_name(Path(opts.out).stem + "_z.csv")
        write_series_csv(standardize(series), target)
        written.append(Path(target))
    return written


def run_causality(opts: CausalityOptions) -> tuple[list[Path], bool]:
    """Returns the files written and whether every cell succeeded."""
    if len(opts.series) < 2:
        raise ConfigError("causality needs at least two series")
    series = [read_series_csv(path, label=label) for label, path in opts.series]
    start = opts.start or max(s.start for s in series)
    end = opts.end or min(s.end for s in series)
    ranges = split_ranges(start, end, opts.split)
    pairs = [(series[0], other) for other in series[1:]]
    # gaps abort the whole run before any estimation
    for x, y in pairs:
        for s, e in ranges:
            align([x, y], s, e)
    table = causality_matrix(pairs, opts.ty, ranges, max_workers=opts.workers)
    out = Path(opts.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    report = out / "report.csv"
    report.write_text(table.to_csv(), encoding="utf-8", newline="")
    summary = out / "summary.txt"
    summary.write_text(table.summary(), encoding="utf-8", newline="")
    written += [report, summary]
    for cell in table.cells:
        if cell.report is None:
            continue
        r = cell.report
        path = out / f"cusum_{r.x_label}_{r.y_label}_{r.sample_start}_{r.sample_end}.csv"
        r.stability.to_csv(path)
        written.append(path)
    sys.stdout.write(table.grid())
    ok = all(c.report is not None for c in table.cells)
    return written, ok


# ---------------------------------------------------------------- config


def read_config(path: str | os.PathLike) -> configparser.ConfigParser:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep series labels as written
    cp.read(path, encoding="utf-8")
    return cp


def _get(cp, section, key, fallback=None):
    if cp is None or not cp.has_section(section):
        return fallback
    value = cp.get(section, key, fallback=None)
    if value is None or value.strip() == "":
        return fallback
    return value.strip()


def _bool(value) -> bool:
    if isinstance(value, bool):
        return value
    v = str(value).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


def _pick(cli_value, cp, section, key, default=None, convert=None):
    """Command line beats config file beats default."""
    if cli_value is not None:
        return cli_value
    value = _get(cp, section, key)
    if value is None:
        return default
    try:
        return convert(value) if convert else value
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from None


def _resolve(base: Path | None, value):
    if value is None:
        return None
    p = Path(value)
    if base is not None and not p.is_absolute():
        p = base / p
    return p


def _ty_config(args, cp) -> TYConfig:
    values = {}
    types = {f.name: f.type for f in fields(TYConfig)}
    for name in types:
        cli_value = getattr(args, name, None)
        default = TYConfig.__dataclass_fields__[name].default
        convert = {"int": int, "float": float, "bool": _bool, "str": str}[
            str(types[name]).replace("'", "")
        ]
        values[name] = _pick(cli_value, cp, "causality", name, default, convert)
    return TYConfig(**values)


def _config_for(args):
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    if not path:
        return None, None
    return read_config(path), Path(path).resolve().parent


def lexicon_options(args, cp=None, base=None) -> LexiconOptions:
    emb = _pick(args.embeddings, cp, "lexicon", "embeddings")
    if emb is None:
        raise ConfigError("no embedding file given (--embeddings or [lexicon] embeddings)")
    out_dir = _resolve(base, _get(cp, "output", "dir")) if cp else None
    default_out = (out_dir / "lexicon.txt") if out_dir else Path("lexicon.txt")
    default_profile = (out_dir / "profile.csv") if out_dir else Path("profile.csv")
    return LexiconOptions(
        embeddings=Path(args.embeddings) if args.embeddings else _resolve(base, emb),
        seed=_pick(args.seed, cp, "lexicon", "seed", "uncertainty"),
        k=_pick(args.k, cp, "lexicon", "k", 4, int),
        out=Path(args.out) if args.out else _resolve(base, _get(cp, "lexicon", "out")) or default_out,
        profile=_pick(args.profile, cp, "lexicon", "profile", 0, int),
        profile_out=Path(args.profile_out)
        if args.profile_out
        else _resolve(base, _get(cp, "lexicon", "profile_out")) or default_profile,
        in_memory=_pick(args.in_memory or None, cp, "lexicon", "in_memory", False, _bool),
    )


def index_options(args, cp=None, base=None, lexicon_path=None) -> IndexOptions:
    if args.articles:
        articles = list(args.articles)
    else:
        raw = _get(cp, "index", "articles")
        if raw is None:
            raise ConfigError("no article files given (--articles or [index] articles)")
        articles = [str(_resolve(base, a)) for a in raw.split()]
    out_dir = _resolve(base, _get(cp, "output", "dir")) if cp else None
    lex = args.lexicon or lexicon_path or _resolve(base, _get(cp, "index", "lexicon"))
    if lex is None:
        lex = (out_dir / "lexicon.txt") if out_dir else None
    if lex is None:
        raise ConfigError("no lexicon file given (--lexicon)")
    default_out = (out_dir / "uncert.csv") if out_dir else Path("uncert.csv")
    weighting = _pick(args.weighting, cp, "index", "weighting", "count")
    if weighting not in ("count", "mean"):
        raise ConfigError(f"weighting must be 'count' or 'mean', got {weighting!r}")
    return IndexOptions(
        articles=articles,
        lexicon=Path(lex),
        out=Path(args.out) if args.out else _resolve(base, _get(cp, "index", "out")) or default_out,
        label=_pick(args.label, cp, "index", "label", "UNCERT"),
        weighting=weighting,
        lenient=_pick(args.lenient or None, cp, "index", "lenient", False, _bool),
        standardize=_pick(args.standardize or None, cp, "index", "standardize", False, _bool),
    )


def _parse_series_arg(text: str) -> tuple[str, Path]:
    if "=" in text:
        label, path = text.split("=", 1)
        return label.strip(), Path(path.strip())
    return Path(text).stem, Path(text)


def causality_options(args, cp=None, base=None, index_series=None) -> CausalityOptions:
    series: list[tuple[str, Path]] = []
    if index_series is not None:
        series.append(index_series)
    if args.series:
        series += [_parse_series_arg(s) for s in args.series]
    elif cp is not None and cp.has_section("series"):
        series += [(label, _resolve(base, path)) for label, path in cp.items("series")]
    out_dir = _resolve(base, _get(cp, "output", "dir")) if cp else None
    default_out = (out_dir / "causality") if out_dir else Path("causality")
    split = args.split or (_get(cp, "causality", "split") or "").split()
    for s in list(split) + [args.start, args.end]:
        if s:
            try:
                parse_month(s)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
    return CausalityOptions(
        series=series,
        out_dir=Path(args.out_dir) if args.out_dir else _resolve(base, _get(cp, "causality", "out_dir")) or default_out,
        start=_pick(args.start, cp, "causality", "start"),
        end=_pick(args.end, cp, "causality", "end"),
        split=list(split),
        workers=_pick(args.workers, cp, "causality", "workers", 1, int),
        ty=_ty_config(args, cp),
    )


# ---------------------------------------------------------------- commands


def cmd_lexicon(args) -> int:
    cp, base = _config_for(args)
    run_lexicon(lexicon_options(args, cp, base))
    return 0


def cmd_index(args) -> int:
    cp, base = _config_for(args)
    run_index(index_options(args, cp, base))
    return 0


def cmd_causality(args) -> int:
    cp, base = _config_for(args)
    _, ok = run_causality(causality_options(args, cp, base))
    return 0 if ok else 1


def _apply_overrides(cp: configparser.ConfigParser, overrides: Sequence[str]) -> None:
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        key, value = item.split("=", 1)
        section, option = key.split(".", 1)
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, option, value)


def _relative(path: Path, base: Path) -> str:
    try:
        return Path(os.path.relpath(Path(path).resolve(), base)).as_posix()
    except ValueError:
        return Path(path).as_posix()


def cmd_pipeline(args) -> int:
    path = args.config or os.environ.get(CONFIG_ENV)
    if not path:
        raise ConfigError(f"no config file (--config or ${CONFIG_ENV})")
    cp = read_config(path)
    _apply_overrides(cp, args.set or [])
    base = Path(path).resolve().parent
    empty = _blank_args()

    # validate everything before doing any work
    lex_opts = lexicon_options(empty, cp, base)
    if not lex_opts.embeddings.is_file():
        raise ConfigError(f"embedding file not found: {lex_opts.embeddings}")
    idx_opts = index_options(empty, cp, base, lexicon_path=lex_opts.out)
    _expand_articles(idx_opts.articles)
    cau_opts = causality_options(empty, cp, base, index_series=(idx_opts.label, idx_opts.out))
    for _, p in cau_opts.series[1:]:
        if not Path(p).is_file():
            raise ConfigError(f"series file not found: {p}")

    out_dir = _resolve(base, _get(cp, "output", "dir")) or base
    out_dir.mkdir(parents=True, exist_ok=True)
    buf = []
    for section in cp.sections():
        buf.append(f"[{section}]")
        buf += [f"{k}={v}" for k, v in sorted(cp.items(section))]
    config_text = "\n".join(buf) + "\n"
    inputs = [lex_opts.embeddings] + [Path(a) for a in _expand_articles(idx_opts.articles)]
    inputs += [p for _, p in cau_opts.series[1:]]
    manifest = {
        "tool": "uncertindex",
        "versions": {
            "uncertindex": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "config_sha256": hashlib.sha256(config_text.encode("utf-8")).hexdigest(),
        "inputs": {_relative(p, base): sha256_file(p) for p in inputs},
        "stages": [],
        "outputs": {},
    }
    status, rc = "ok", 0
    written: list[Path] = []
    try:
        written += run_lexicon(lex_opts)
        manifest["stages"].append({"name": "lexicon", "status": "ok"})
        written += run_index(idx_opts)
        manifest["stages"].append({"name": "index", "status": "ok"})
        files, ok = run_causality(cau_opts)
        written += files
        manifest["stages"].append({"name": "causality", "status": "ok" if ok else "partial"})
        if not ok:
            status, rc = "partial", 1
    except (UncertIndexError, ValueError, OSError) as exc:
        stage = ("lexicon", "index", "causality")[len(manifest["stages"])]
        manifest["stages"].append({"name": stage, "status": "failed", "error": str(exc)})
        status, rc = "failed", 1
        print(f"error: {exc}", file=sys.stderr)
    manifest["status"] = status
    manifest["outputs"] = {_relative(p, base): sha256_file(p) for p in written}
    manifest["digest"] = hashlib.sha256(
        json.dumps(manifest, sort_keys=True).encode("utf-8")
    ).hexdigest()
    manifest["created"] = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return rc


# ---------------------------------------------------------------- parser


def _blank_args() -> argparse.Namespace:
    """Namespace with every stage flag unset, so config values apply."""
    sub = next(a for a in build_parser()._actions if isinstance(a, argparse._SubParsersAction))
    dests = {
        action.dest
        for name in ("lexicon", "index", "causality")
        for action in sub.choices[name]._actions
        if action.dest not in ("help", "config")
    }
    return argparse.Namespace(**{d: None for d in dests})


def _add_ty_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("causality procedure")
    g.add_argument("--criterion", choices=["AIC", "HQ", "SC", "FPE"], help="lag criterion (default AIC)")
    g.add_argument("--p-max", dest="p_max", type=int, help="largest lag order considered (default 10)")
    g.add_argument("--alpha-diag", dest="alpha_diag", type=float, help="serial-correlation test level (default 0.05)")
    g.add_argument("--h-portmanteau", dest="h_portmanteau", type=int, help="portmanteau horizon (default 16)")
    g.add_argument("--h-bg", dest="h_bg", type=int, help="Breusch-Godfrey lags (default 5)")
    g.add_argument("--max-d", dest="max_d", type=int, choices=[1, 2], help="largest integration order (default 2)")
    g.add_argument("--alpha-unit-root", dest="alpha_unit_root", type=float, help="ADF/KPSS level (default 0.05)")
    g.add_argument("--adf-regression", dest="adf_regression", choices=["c", "ct"], help="ADF deterministic terms (default ct)")
    g.add_argument("--kpss-null", dest="kpss_null", choices=["level", "trend"], help="KPSS null (default level)")
    g.add_argument("--alpha-stability", dest="alpha_stability", type=float, help="OLS-CUSUM level (default 0.05)")
    g.add_argument("--min-obs", dest="min_obs", type=int, help="fewest common months per sample (default 60)")
    g.add_argument(
        "--no-intercept-penalty",
        dest="intercept_penalty",
        action="store_const",
        const=False,
        help="exclude intercepts from the criterion penalty",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uncertindex",
        description="Build a news uncertainty index and test Granger causality against other indices.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument(
            "--config",
            help=f"sectioned key=value config file; flags override it (default ${CONFIG_ENV})",
        )

    p = sub.add_parser("lexicon", help="expand a seed word with its nearest embedding neighbors")
    add_config(p)
    p.add_argument("--embeddings", help="word-vector text file (token v1 ... vd per line)")
    p.add_argument("--seed", help="seed word, lowercased before lookup (default uncertainty)")
    p.add_argument("--k", type=int, help="number of neighbors to add (default 4)")
    p.add_argument("--out", help="lexicon file to write (default lexicon.txt)")
    p.add_argument("--profile", type=int, help="also write the distances of the N nearest words")
    p.add_argument("--profile-out", dest="profile_out", help="profile CSV path (default profile.csv)")
    p.add_argument(
        "--in-memory",
        dest="in_memory",
        action="store_true",
        help="load the whole table instead of streaming distances",
    )
    p.set_defaults(func=cmd_lexicon)

    p = sub.add_parser("index", help="monthly share of articles matching a lexicon")
    add_config(p)
    p.add_argument("--articles", nargs="+", help="JSON-lines article files or glob patterns")
    p.add_argument("--lexicon", help="lexicon file, one word per line")
    p.add_argument("--out", help="monthly CSV to write (default uncert.csv)")
    p.add_argument("--label", help="series label (default UNCERT)")
    p.add_argument("--weighting", choices=["count", "mean"], help="pool the month (count) or average daily shares (mean)")
    p.add_argument("--lenient", action="store_true", help="skip malformed lines instead of failing")
    p.add_argument("--standardize", action="store_true", help="also write a z-scored copy (<out>_z.csv)")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("causality", help="Toda-Yamamoto tests of the first series against each other one")
    add_config(p)
    p.add_argument("--series", nargs="+", help="month,value CSVs as LABEL=path (label defaults to file stem)")
    p.add_argument("--out-dir", dest="out_dir", help="directory for report.csv, summary.txt and CUSUM paths")
    p.add_argument("--start", help="first month YYYY-MM (default: common overlap)")
    p.add_argument("--end", help="last month YYYY-MM (default: common overlap)")
    p.add_argument("--split", nargs="+", help="also run the sub-samples cut at these months")
    p.add_argument("--workers", type=int, help="threads for independent cells (default 1)")
    _add_ty_flags(p)
    p.set_defaults(func=cmd_causality)

    p = sub.add_parser("pipeline", help="lexicon, index and causality from one config file")
    add_config(p)
    p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="override a config entry")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (UncertIndexError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
