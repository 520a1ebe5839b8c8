"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 computation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__, attrstats, fraudclf, harvester, netmetrics, report, synthgen
from .errors import DataError, LinkFraudError, UndefinedMetricError
from .graph_store import load_attributes, load_edges, load_labels, write_attributes, write_edges, write_labels
from .subnet import DIRECTIONS, extract_boomerang, extract_egonet, write_view

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_COMPUTE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _ids(text: str) -> list:
    ids = [s.strip() for s in text.split(",") if s.strip()]
    if not ids:
        raise UsageError("expected a comma-separated list of account ids")
    return ids


def _dump(obj, out) -> None:
    out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in r])
    return buf.getvalue()


def _emit(text: str, path, out) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        out.write(text)


def _view(g, egos, kind, direction):
    if kind == "egonet":
        return extract_egonet(g, egos, direction)
    if kind == "boomerang":
        return extract_boomerang(g, egos, direction)
    return g


def _accounts_for(args, attrs):
    """Accounts named by --egos (their followers) or every attributed account."""
    if args.egos:
        if not args.edges:
            raise UsageError("--egos needs --edges")
        g = load_edges(args.edges)
        ids = set()
        for e in _ids(args.egos):
            if e not in g:
                raise DataError(f"unknown ego {e!r}")
            ids |= g.in_neighbors(e)
        return [attrs[u] for u in sorted(ids) if u in attrs]
    return [attrs[k] for k in sorted(attrs)]


# -- subcommands -----------------------------------------------------------------


def cmd_ingest(args, out):
    g = load_edges(args.edges)
    summary = {"n_nodes": g.n_nodes, "n_edges": g.n_edges}
    attrs = labels = None
    if args.attributes:
        attrs = load_attributes(args.attributes)
        summary["n_attributes"] = len(attrs)
    if args.labels:
        labels = load_labels(args.labels)
        summary["n_labels"] = len(labels)
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        write_edges(g, d / "edges.csv")
        if attrs is not None:
            write_attributes(attrs, d / "attributes.csv")
        if labels is not None:
            write_labels(labels, d / "labels.csv")
    _dump(summary, out)


def _cmd_view(kind):
    def run(args, out):
        g = load_edges(args.edges)
        view = _view(g, _ids(args.egos), kind, args.direction)
        if args.out:
            write_view(view, args.out)
        _dump({
            "kind": view.kind,
            "egos": sorted(view.egos),
            "n_nodes": view.n_nodes,
            "n_edges": view.n_edges,
            "n_followers": len(view.followers),
            "n_friends": len(view.friends),
        }, out)
    return run


METRIC_COLUMNS = ("view", "egos", "n_nodes", "n_edges", "density", "transitivity", "reciprocity",
                  "bipartite_density", "overlap", "mse_estimate")


def cmd_metrics(args, out):
    g = load_edges(args.edges)
    egos = _ids(args.egos) if args.egos else []
    if args.view != "graph" and not egos:
        raise UsageError(f"--view {args.view} needs --egos")
    view = _view(g, egos, args.view, args.direction)
    rep = netmetrics.metric_report(view).asdict()
    rep["view"] = args.view
    rep["egos"] = egos
    rep["overlap"] = rep["mse_estimate"] = None
    if len(egos) == 2:
        a, b = (g.in_neighbors(e) for e in egos)
        try:
            rep["overlap"] = netmetrics.overlap_coefficient(a, b)
            rep["mse_estimate"] = netmetrics.mse_estimate(a, b)
        except UndefinedMetricError:
            pass
    row = [rep[c] if c != "egos" else ";".join(egos) for c in METRIC_COLUMNS]
    if args.csv:
        path = Path(args.csv)
        new = not path.exists() or path.stat().st_size == 0
        with path.open("a", newline="", encoding="utf-8") as fh:
            text = _csv_text(METRIC_COLUMNS, [row])
            fh.write(text if new else text.split("\n", 1)[1])
    if args.format == "csv":
        out.write(_csv_text(METRIC_COLUMNS, [row]))
    else:
        _dump(rep, out)


def cmd_entropy(args, out):
    attrs = load_attributes(args.attributes)
    accounts = _accounts_for(args, attrs)
    if not accounts:
        raise DataError("no attributed accounts to summarise")
    table = attrstats.attribute_entropy_table(accounts)
    maxrow = attrstats.max_entropy_row(accounts)
    label = args.label or (args.egos or "all")
    if args.format == "json":
        _emit(json.dumps({"label": label, "n_accounts": len(accounts), "entropy": table,
                          "max_entropy": maxrow}, indent=2, sort_keys=True) + "\n", args.out, out)
        return
    rows = [[label, *(table[a] for a in attrstats.ATTRIBUTES)],
            ["max_entropy", *(maxrow[a] for a in attrstats.ATTRIBUTES)]]
    _emit(_csv_text(("view", *attrstats.ATTRIBUTES), rows), args.out, out)


def cmd_plfit(args, out):
    attrs = load_attributes(args.attributes)
    if args.field not in attrstats.ATTRIBUTE_KIND or attrstats.ATTRIBUTE_KIND[args.field] != "count":
        raise UsageError(f"--field must be a count attribute, got {args.field!r}")
    accounts = _accounts_for(args, attrs)
    values = [getattr(a, args.field) for a in accounts]
    counts = [v for v in values if v]  # zeros and missing values are outside the fitted support
    fit = attrstats.fit_powerlaw(counts, min_frequency=args.min_frequency)
    pts = attrstats.rank_frequency(counts)
    if args.points:
        Path(args.points).write_text(_csv_text(("rank", "frequency"), pts), encoding="utf-8")
    doc = {"field": args.field, "dropped": len(values) - len(counts), **fit.asdict()}
    if args.format == "csv":
        out.write(_csv_text(("field", "n", "alpha_mle", "alpha_rank", "divergent"),
                            [[args.field, doc["n"], doc["alpha_mle"], doc["alpha_rank"], doc["divergent"]]]))
    else:
        _dump(doc, out)


def cmd_tokens(args, out):
    attrs = load_attributes(args.attributes)
    accounts = _accounts_for(args, attrs)
    stop = None
    if args.stopwords:
        p = Path(args.stopwords)
        if not p.exists():
            raise DataError(f"stopword file not found: {p}")
        stop = [w.strip() for w in p.read_text(encoding="utf-8").splitlines() if w.strip()]
    freq = attrstats.token_frequency((a.description for a in accounts), stop)
    if args.top:
        freq = freq[: args.top]
    if args.format == "json":
        _dump([{"token": t, "count": c} for t, c in freq], out)
    else:
        out.write(_csv_text(("token", "count"), freq))


def cmd_synth(args, out):
    config = synthgen.DEFAULT_CORPUS
    if args.config:
        p = Path(args.config)
        if not p.exists():
            raise DataError(f"config file not found: {p}")
        try:
            config = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataError(f"malformed config {p}: {exc}") from None
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    if "regimes" in config:
        corpus = synthgen.gen_corpus(synthgen.corpus_spec_from_config(config, seed=seed))
        resolved = {**config, "seed": seed}
    else:
        params = synthgen.RegimeParams.from_dict({**config, "seed": seed})
        gen = {"genuine": synthgen.gen_genuine, "freemium": synthgen.gen_freemium}.get(
            params.regime, synthgen.gen_premium)
        corpus = gen(params)
        resolved = params.to_dict()
    d = Path(args.out)
    corpus.write(d)
    fraud = [c for c in corpus.customers if corpus.labels[c] == "fraud"]
    (d / "honeypots.txt").write_text("".join(f"{c}\n" for c in fraud), encoding="utf-8")
    (d / "config.json").write_text(json.dumps(resolved, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _dump({
        "out": str(d),
        "seed": seed,
        "n_nodes": corpus.graph.n_nodes,
        "n_edges": corpus.graph.n_edges,
        "n_customers": len(corpus.customers),
        "services": len(corpus.services),
    }, out)


def cmd_features(args, out):
    g = load_edges(args.edges)
    attrs = load_attributes(args.attributes)
    if args.labels:
        accounts = sorted(load_labels(args.labels))
    elif args.accounts:
        accounts = _ids(args.accounts)
    else:
        raise UsageError("features needs --labels or --accounts")
    X = fraudclf.feature_matrix(accounts, g, attrs)
    if args.out:
        fraudclf.write_features(accounts, X, args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["account_id", *fraudclf.FEATURE_NAMES])
        for acc, row in zip(accounts, X):
            w.writerow([acc, *(repr(float(v)) for v in row)])
        out.write(buf.getvalue())


def _labeled(args):
    ids, X = fraudclf.load_features(args.features)
    labels = load_labels(args.labels)
    missing = [i for i in ids if i not in labels]
    if missing:
        raise DataError(f"{len(missing)} feature row(s) have no label, e.g. {missing[0]!r}")
    return ids, X, [labels[i] for i in ids]


def cmd_train(args, out):
    _, X, y = _labeled(args)
    grp = fraudclf.feature_group(args.group)
    cols = list(grp.indices)
    model = fraudclf.train_svm(X[:, cols], y, C=args.C, gamma=args.gamma, feature_indices=cols)
    model.save(args.model)
    _dump({"model": args.model, "group": grp.name, "C": model.C, "gamma": model.gamma,
           "n_support": int(len(model.alphas)), "iterations": model.diagnostics["iterations"]}, out)


def cmd_crossval(args, out):
    _, X, y = _labeled(args)
    rep = fraudclf.cross_validate(X, y, k=args.k, group=args.group, C=args.C, gamma=args.gamma, seed=args.seed)
    doc = rep.asdict()
    if args.format == "csv":
        out.write(_csv_text(("group", "k", "seed", "precision", "recall", "f1", "tp", "fp", "tn", "fn"),
                            [[rep.group, rep.k, rep.seed, rep.precision, rep.recall, rep.f1,
                              rep.tp, rep.fp, rep.tn, rep.fn]]))
    else:
        _dump(doc, out)


def cmd_harvest(args, out):
    honeypots = _ids(args.honeypots) if args.honeypots else None
    source, honeypots = harvester.load_fixture(args.fixture, honeypots)
    cfg = harvester.load_config(args.config) if args.config else harvester.HarvestConfig()
    if args.credentials:
        cfg.credentials = tuple(_ids(args.credentials))
    if args.hours < 0:
        raise UsageError("--hours must be >= 0")
    res = harvester.harvest(source, honeypots, args.hours, cfg)
    stats = res.stats()
    stats["hours"] = args.hours
    stats["config"] = cfg.to_dict()
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        harvester.write_snapshots(res.records, d / "snapshots.ndjson")
    _dump(stats, out)


def cmd_report(args, out):
    written = report.build_report(args.input, args.out)
    _dump({"out": args.out, "files": written}, out)


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="linkfraud", description="Link-fraud characterization toolkit.")
    p.add_argument("--version", action="version", version=f"linkfraud {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("ingest", cmd_ingest, "validate (and optionally normalise) input tables")
    sp.add_argument("--edges", required=True)
    sp.add_argument("--attributes")
    sp.add_argument("--labels")
    sp.add_argument("--out")

    for name, help_ in (("egonet", "extract the egonet of one or more egos"),
                        ("boomerang", "extract the boomerang network of one or more egos")):
        sp = add(name, _cmd_view(name), help_)
        sp.add_argument("--edges", required=True)
        sp.add_argument("--egos", required=True)
        sp.add_argument("--direction", choices=DIRECTIONS, default="in")
        sp.add_argument("--out")

    sp = add("metrics", cmd_metrics, "network summary statistics for a view")
    sp.add_argument("--edges", required=True)
    sp.add_argument("--egos")
    sp.add_argument("--view", choices=("egonet", "boomerang", "graph"), default="egonet")
    sp.add_argument("--direction", choices=DIRECTIONS, default="in")
    sp.add_argument("--csv", help="append one row per run to this CSV file")
    sp.add_argument("--format", choices=("json", "csv"), default="json")

    for name, fn, help_ in (("entropy", cmd_entropy, "per-attribute entropy table"),
                            ("plfit", cmd_plfit, "power-law exponent of a count attribute"),
                            ("tokens", cmd_tokens, "description token frequencies")):
        sp = add(name, fn, help_)
        sp.add_argument("--attributes", required=True)
        sp.add_argument("--edges")
        sp.add_argument("--egos", help="restrict to the followers of these accounts")
        sp.add_argument("--format", choices=("json", "csv"), default="csv" if name != "plfit" else "json")
        if name == "entropy":
            sp.add_argument("--label")
            sp.add_argument("--out")
        elif name == "plfit":
            sp.add_argument("--field", default="followers_count")
            sp.add_argument("--min-frequency", type=int, default=10)
            sp.add_argument("--points", help="write rank,frequency points here")
        else:
            sp.add_argument("--top", type=int, default=0)
            sp.add_argument("--stopwords")

    sp = add("synth", cmd_synth, "generate a labelled synthetic corpus")
    sp.add_argument("--config", help="corpus or single-regime JSON config")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int)

    sp = add("features", cmd_features, "follower-entropy feature vectors")
    sp.add_argument("--edges", required=True)
    sp.add_argument("--attributes", required=True)
    sp.add_argument("--labels")
    sp.add_argument("--accounts")
    sp.add_argument("--out")

    for name, fn, help_ in (("train", cmd_train, "train an RBF-SVM and save it"),
                            ("crossval", cmd_crossval, "stratified k-fold cross-validation")):
        sp = add(name, fn, help_)
        sp.add_argument("--features", required=True)
        sp.add_argument("--labels", required=True)
        sp.add_argument("--group", choices=tuple(fraudclf.GROUPS), default="All")
        sp.add_argument("--C", type=float, default=1.0)
        sp.add_argument("--gamma", type=float)
        if name == "train":
            sp.add_argument("--model", required=True)
        else:
            sp.add_argument("--k", type=int, default=10)
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = add("harvest", cmd_harvest, "simulate rate-limited polling against a fixture")
    sp.add_argument("--fixture", required=True)
    sp.add_argument("--hours", type=float, default=24.0)
    sp.add_argument("--config")
    sp.add_argument("--honeypots")
    sp.add_argument("--credentials")
    sp.add_argument("--out")

    sp = add("report", cmd_report, "summary tables for a corpus directory")
    sp.add_argument("--input", required=True)
    sp.add_argument("--out", required=True)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError(parser.format_usage())
        args.func(args, out)
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except UsageError as exc:
        err.write(str(exc).rstrip("\n") + "\n")
        return EXIT_USAGE
    except LinkFraudError as exc:
        err.write(f"linkfraud: {exc}\n")
        return exc.exit_code
    except (OSError, ValueError) as exc:
        err.write(f"linkfraud: {exc}\n")
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
