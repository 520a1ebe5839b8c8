"""Summary tables for a generated or collected corpus.

Reads a corpus directory (edges.csv, attributes.csv, services.csv) and writes
one CSV per summary table plus rank-frequency point files for replotting.
"""
from __future__ import annotations

import csv
from pathlib import Path

from . import netmetrics
from .attrstats import ATTRIBUTES, attribute_entropy_table, fit_powerlaw, max_entropy_row, rank_frequency
from .errors import DataError, InsufficientDataError, ParseError, UndefinedMetricError
from .graph_store import load_attributes, load_edges
from .subnet import extract_boomerang, extract_egonet

REQUIRED = ("edges.csv", "attributes.csv", "services.csv")
EGONET_COLUMNS = ("service", "regime", "n_nodes", "n_edges", "density", "transitivity", "reciprocity")
BOOMERANG_COLUMNS = ("service", "regime", "n_nodes", "n_edges", "bipartite_density")
REUSE_COLUMNS = ("service", "regime", "n_nodes", "overlap", "est_pool_nodes")
ENTROPY_COLUMNS = ("service", "regime") + ATTRIBUTES


def load_services(path) -> dict:
    """service id -> (regime, [customers]) from services.csv."""
    services: dict = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        if next(reader, None) != ["service", "regime", "customer"]:
            raise ParseError("services header must be service,regime,customer", line=1)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", line=lineno)
            sid, regime, customer = row
            entry = services.setdefault(sid, (regime, []))
            if entry[0] != regime:
                raise ParseError(f"service {sid} listed under two regimes", line=lineno)
            entry[1].append(customer)
    return services


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write(path, header, rows):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])


def build_report(corpus_dir, out_dir) -> dict:
    """Write the table bundle; returns {file name: row count}."""
    corpus_dir, out_dir = Path(corpus_dir), Path(out_dir)
    missing = [n for n in REQUIRED if not (corpus_dir / n).exists()]
    if missing:
        raise DataError(f"report input {corpus_dir} is missing: {', '.join(missing)}")
    g = load_edges(corpus_dir / "edges.csv")
    attrs = load_attributes(corpus_dir / "attributes.csv")
    services = load_services(corpus_dir / "services.csv")
    if not services:
        raise DataError("services.csv lists no services")
    out_dir.mkdir(parents=True, exist_ok=True)

    egonet_rows, boom_rows, reuse_rows, entropy_rows = [], [], [], []
    followers_by_service = {}
    counts_by_regime: dict = {}
    for sid in sorted(services):
        regime, customers = services[sid]
        ego = extract_egonet(g, customers)
        rep = netmetrics.metric_report(ego)
        egonet_rows.append((sid, regime, rep.n_nodes, rep.n_edges, rep.density, rep.transitivity, rep.reciprocity))
        boom = netmetrics.metric_report(extract_boomerang(g, customers))
        boom_rows.append((sid, regime, boom.n_nodes, boom.n_edges, boom.bipartite_density))
        fsets = [set(g.in_neighbors(c)) for c in customers]
        union = set().union(*fsets)
        followers_by_service[sid] = union
        if len(customers) == 2:
            try:
                ov = netmetrics.overlap_coefficient(*fsets)
                pool = netmetrics.mse_estimate(*fsets)
            except UndefinedMetricError:
                ov = pool = None
            reuse_rows.append((sid, regime, len(union), ov, pool))
        accounts = [attrs[u] for u in sorted(union) if u in attrs]
        if accounts:
            table = attribute_entropy_table(accounts)
            entropy_rows.append((sid, regime, *(table[a] for a in ATTRIBUTES)))
            counts_by_regime.setdefault(regime, []).extend(
                a.followers_count for a in accounts if a.followers_count
            )
    all_accounts = list(attrs.values())
    maxrow = max_entropy_row(all_accounts)
    entropy_rows.append(("max_entropy", "", *(maxrow[a] for a in ATTRIBUTES)))

    sids = sorted(followers_by_service)
    overlap_rows = []
    for a in sids:
        row = [a]
        for b in sids:
            fa, fb = followers_by_service[a], followers_by_service[b]
            row.append(netmetrics.overlap_coefficient(fa, fb) if fa and fb else None)
        overlap_rows.append(row)

    written = {}
    for name, header, rows in (
        ("egonet_stats.csv", EGONET_COLUMNS, egonet_rows),
        ("boomerang_stats.csv", BOOMERANG_COLUMNS, boom_rows),
        ("account_reuse.csv", REUSE_COLUMNS, reuse_rows),
        ("provider_overlap.csv", ("service", *sids), overlap_rows),
        ("attribute_entropy.csv", ENTROPY_COLUMNS, entropy_rows),
    ):
        _write(out_dir / name, header, rows)
        written[name] = len(rows)

    fit_rows = []
    for regime in sorted(counts_by_regime):
        counts = counts_by_regime[regime]
        pts = rank_frequency(counts)
        _write(out_dir / f"rank_frequency_{regime}.csv", ("rank", "frequency"), pts)
        written[f"rank_frequency_{regime}.csv"] = len(pts)
        try:
            fit = fit_powerlaw(counts)
            fit_rows.append((regime, fit.n, None if fit.divergent else fit.alpha_mle, fit.alpha_rank))
        except InsufficientDataError:
            fit_rows.append((regime, len(counts), None, None))
    _write(out_dir / "powerlaw_fits.csv", ("regime", "n", "alpha_mle", "alpha_rank"), fit_rows)
    written["powerlaw_fits.csv"] = len(fit_rows)
    return written

