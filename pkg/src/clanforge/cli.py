"""Command-line entry point: ``clanforge <command> ...``."""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import metrics
from .centrality import betweenness, pagerank
from .cohorts import (COHORTS, CohortAssignment, classify_by_score, classify_groups, correlate_cohort,
                      correlate_scores)
from .community import clans_to_partition, map_equation, nmi, optimize_map_equation
from .graph import IngestSummary, PlayerTable, build_graph, load_edge_list, load_metadata, write_edge_list
from .powerlaw import fit_gamma_mle, model_pmf
from .recommender import RecommendConfig, batch_recommend, recommend_clan
from .reports import atomic_write, write_csv, write_json
from .synth import generate_powerlaw, generate_uniform

log = logging.getLogger("clanforge")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARTIAL = 3


class CommandError(Exception):
    pass


def _open_text(path: str):
    if path == "-":
        return sys.stdin
    return open(path, encoding="utf-8", newline="")


def _load_graph(path: str):
    summary = IngestSummary()
    try:
        with _open_text(path) as fh:
            pairs = load_edge_list(fh)
    except OSError as exc:
        raise CommandError(f"cannot read edge list {path}: {exc.strerror or exc}") from None
    g = build_graph(pairs, summary=summary)
    log.info("loaded %s: n=%d m=%d (%d self-loops, %d duplicates dropped)",
             path, g.node_count, g.edge_count, summary.self_loops, summary.duplicates)
    return g, summary


def _load_table(path: str | None) -> PlayerTable | None:
    if path is None:
        return None
    try:
        with _open_text(path) as fh:
            return load_metadata(fh)
    except OSError as exc:
        raise CommandError(f"cannot read metadata {path}: {exc.strerror or exc}") from None


class _Fields:
    """Collects per-field failures so reports stay well formed."""

    def __init__(self):
        self.errors: dict[str, str] = {}

    def run(self, name, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, KeyError, ArithmeticError) as exc:
            self.errors[name] = str(exc).strip("'\"")
            log.warning("%s unavailable: %s", name, self.errors[name])
            return None


def _dist_rows(table: dict) -> list:
    return [(k, v) for k, v in sorted(table.items())]


def cmd_analyze(args) -> int:
    g, ingest = _load_graph(args.edges)
    table = _load_table(args.metadata)
    out = Path(args.out_dir)
    fields = _Fields()
    n, m = g.node_count, g.edge_count

    dist = fields.run("degree_distribution", metrics.degree_distribution, g)
    comps = metrics.connected_components(g)
    clustering = fields.run("clustering", metrics.average_clustering, g)

    lcc = np.flatnonzero(comps.partition.labels == comps.largest)
    mode = args.path_mode
    if mode == "auto":
        mode = "exact" if len(lcc) <= args.exact_limit else "sampled"
    path_value = fields.run("average_path", metrics.average_shortest_path, g, lcc, mode,
                            args.sample_sources, args.seed)

    fit = fields.run("powerlaw", fit_gamma_mle, g.degrees.tolist(), args.xmin)

    rand = generate_uniform(n, m, args.seed) if n else None
    rand_dist = metrics.degree_distribution(rand) if rand is not None else None
    rand_clustering = metrics.average_clustering(rand) if rand is not None else None

    small_world = None
    if dist is not None and path_value is not None and clustering is not None:
        sw = fields.run("small_world", metrics.small_world_verdict, n, dist.mean_degree, path_value,
                        clustering, rand_clustering, args.path_factor, args.clustering_factor)
        if sw is not None:
            small_world = {"measured_avg_path": sw.measured_avg_path, "expected_avg_path": sw.expected_avg_path,
                           "measured_clustering": sw.measured_clustering, "random_clustering": sw.random_clustering,
                           "path_factor": sw.path_factor, "clustering_factor": sw.clustering_factor,
                           "verdict": sw.verdict}
    elif "small_world" not in fields.errors:
        fields.errors["small_world"] = "needs mean degree, average path and clustering"

    summary = {
        "n": n,
        "m": m,
        "ingest": {"pairs_read": ingest.pairs_read, "self_loops": ingest.self_loops,
                   "duplicates": ingest.duplicates},
        "mean_degree": dist.mean_degree if dist else None,
        "mean_degree_display": round(dist.mean_degree, 1) if dist else None,
        "components": {"count": comps.count, "largest_size": comps.largest_size,
                       "largest_edge_count": comps.largest_edge_count,
                       "largest_node_fraction": comps.largest_size / n if n else None,
                       "largest_edge_fraction": comps.largest_edge_count / m if m else None},
        "clustering": clustering,
        "average_path": {"value": path_value, "mode": mode, "nodes": int(len(lcc)),
                         "sources": args.sample_sources if mode == "sampled" else int(len(lcc)),
                         "seed": args.seed if mode == "sampled" else None},
        "powerlaw": fit.to_json() if fit else None,
        "random_baseline": {"seed": args.seed, "clustering": rand_clustering,
                            "mean_degree": rand_dist.mean_degree if rand_dist else None},
        "small_world": small_world,
        "errors": fields.errors,
    }
    if table is not None:
        in_net = sum(1 for c in table if g.has_id(c))
        summary["population"] = {"characters": len(table), "in_network": in_net,
                                 "network_fraction": in_net / len(table) if len(table) else None,
                                 "network_without_metadata": int(n - in_net)}

    if dist is not None:
        write_csv(out / "degree_pmf.csv", ("degree", "fraction"), _dist_rows(dist.pmf))
        write_csv(out / "degree_ccdf.csv", ("degree", "fraction"), _dist_rows(dist.ccdf))
    if rand_dist is not None:
        write_csv(out / "random_degree_pmf.csv", ("degree", "fraction"), _dist_rows(rand_dist.pmf))
        write_csv(out / "random_degree_ccdf.csv", ("degree", "fraction"), _dist_rows(rand_dist.ccdf))
    if fit is not None:
        kmax = int(g.degrees.max())
        write_csv(out / "powerlaw_model.csv", ("degree", "value"),
                  sorted(model_pmf(fit.gamma, range(1, kmax + 1)).items()))
    if args.centrality:
        for sv in (pagerank(g), betweenness(g)):
            _write_scores(out / f"{sv.algorithm}.csv", sv)
    write_json(out / "summary.json", summary)
    return EXIT_PARTIAL if fields.errors else EXIT_OK


def _write_scores(path: Path, sv) -> None:
    order = sv.ranking()
    write_csv(path, ("char_id", "score"), ((int(sv.ids[i]), float(sv.scores[i])) for i in order))


def _write_cohorts(path: Path, a: CohortAssignment) -> None:
    rows = sorted((c, name) for name in COHORTS for c in getattr(a, name))
    write_csv(path, ("char_id", "cohort"), rows)


def cmd_groups(args) -> int:
    g, _ = _load_graph(args.edges)
    table = _load_table(args.metadata)
    if table is None and (args.correlate or args.count_nonplayers):
        raise CommandError("--metadata is required for correlations and --count-nonplayers")
    out = Path(args.out_dir)
    fields = _Fields()
    n = g.node_count

    scores = None
    if args.method == "alg1":
        assignment = classify_groups(g, strict=args.strict)
        write_csv(out / "removal_trace.csv", ("step", "removed_id", "scc_size", "diss_count"),
                  ((i + 1, s.removed, s.scc_size, s.diss_count) for i, s in enumerate(assignment.removal_trace)))
    else:
        scores = pagerank(g) if args.method == "pagerank" else betweenness(g, normalized=True)
        assignment = classify_by_score(scores, args.hardcore_fraction, args.peripheral_fraction)
        _write_scores(out / f"{scores.algorithm}.csv", scores)
    _write_cohorts(out / "cohorts.csv", assignment)

    sizes = assignment.sizes()
    report = {
        "method": args.method,
        "n": n,
        "sizes": sizes,
        "fractions": {k: (v / n if n else None) for k, v in sizes.items()},
    }
    if args.method == "alg1":
        report["loop"] = {"comparison": ">" if args.strict else ">=", "iterations": len(assignment.removal_trace),
                          "final_scc": assignment.final_scc, "final_diss": assignment.final_diss}
    else:
        report["requested_fractions"] = {"hardcore": args.hardcore_fraction,
                                         "peripheral": args.peripheral_fraction}

    if table is not None:
        corr = {}
        for metric in ("online_time", "kills"):
            r = fields.run(f"correlation.{metric}", correlate_cohort, assignment, "hardcore", table, metric,
                           g.ids.tolist())
            entry = {"hardcore_point_biserial": r.r if r else None}
            if scores is not None:
                rs = fields.run(f"score_correlation.{metric}", correlate_scores, scores, table, metric)
                entry["score_pearson"] = rs.r if rs else None
            corr[metric] = entry
        report["correlations"] = corr
        if args.count_nonplayers:
            total = len(set(table) | set(g.ids.tolist()))
            outside = total - n
            breakdown = dict(sizes)
            breakdown["peripheral"] += outside
            report["population_breakdown"] = {
                "population": total, "not_in_network": outside,
                "sizes": breakdown, "fractions": {k: v / total for k, v in breakdown.items()}}
    report["errors"] = fields.errors
    write_json(out / "groups.json", report)
    return EXIT_PARTIAL if fields.errors else EXIT_OK


def cmd_communities(args) -> int:
    g, _ = _load_graph(args.edges)
    table = _load_table(args.metadata)
    out = Path(args.out_dir)
    result = optimize_map_equation(g, args.seed, args.teleport)
    part = result.partition
    write_csv(out / "communities.csv", ("char_id", "block_id"), zip(part.ids.tolist(), part.labels.tolist()))
    score = map_equation(g, part, args.teleport)
    report = {"seed": args.seed, "teleport": args.teleport, "block_count": part.block_count,
              "codelength": score.codelength, "index_codelength": score.index_codelength,
              "module_codelength": score.module_codelength,
              "one_block_codelength": map_equation(g, np.zeros(g.node_count, dtype=np.int64), args.teleport).codelength,
              "nmi": [], "errors": {}}
    if table is not None:
        fields = _Fields()
        clans_all = clans_to_partition(table, g.ids.tolist(), args.clanless)
        report["nmi"].append({"p1": "communities", "p2": f"clans(clanless={args.clanless})", "nodes": len(clans_all),
                              "value": fields.run("nmi.all_players", nmi, part, clans_all, args.normalization)})
        clans_members = clans_to_partition(table, g.ids.tolist(), "drop")
        members = fields.run("nmi.members_only", nmi, part.restrict(clans_members.ids), clans_members,
                             args.normalization) if len(clans_members) else None
        if not len(clans_members):
            fields.errors["nmi.members_only"] = "no clan members in the network"
        report["nmi"].append({"p1": "communities(members-only)", "p2": "clans(members-only)",
                              "nodes": len(clans_members), "value": members})
        report["normalization"] = args.normalization
        report["errors"] = fields.errors
    write_json(out / "nmi.json", report)
    return EXIT_PARTIAL if report["errors"] else EXIT_OK


def _load_points(path: str | None) -> dict[str, float] | None:
    if path is None:
        return None
    try:
        with _open_text(path) as fh:
            reader = csv.DictReader(fh)
            return {row["clan_id"].strip(): float(row["points"]) for row in reader}
    except OSError as exc:
        raise CommandError(f"cannot read clan points {path}: {exc.strerror or exc}") from None
    except (KeyError, ValueError) as exc:
        raise CommandError(f"clan points file needs clan_id,points columns: {exc}") from None


def cmd_recommend(args) -> int:
    g, _ = _load_graph(args.edges)
    table = _load_table(args.metadata)
    points = _load_points(args.clan_points)
    if args.points_balance is not None and points is None:
        raise CommandError("--points-balance needs --clan-points")
    cfg = RecommendConfig(args.max_clan_size, args.points_balance, args.max_rounds, args.seed,
                          args.teleport, not args.reuse_partition)
    out = Path(args.out_dir)
    if args.player is not None:
        if not g.has_id(args.player):
            raise CommandError(f"unknown player id {args.player}")
        part = optimize_map_equation(g, cfg.seed, cfg.teleport).partition
        recs = [recommend_clan(g, table, part, None, points, args.player, cfg)]
    else:
        recs = batch_recommend(g, table, cfg, clan_points=points)
    write_csv(out / "recommendations.csv", ("char_id", "outcome", "clan_id", "rounds_used"),
              ((r.player, r.label, r.clan_id, r.rounds_used) for r in recs))
    tally: dict[str, int] = {}
    for r in recs:
        tally[r.label] = tally.get(r.label, 0) + 1
    clanless = sum(1 for c in g.ids.tolist() if table.clan_of(c) is None)
    write_json(out / "recommend.json", {
        "seed": cfg.seed, "max_clan_size": cfg.max_clan_size, "points_balance": cfg.points_balance,
        "max_rounds": cfg.max_rounds, "redetect": cfg.redetect, "network_nodes": g.node_count,
        "clanless_in_network": clanless, "queries": len(recs), "outcomes": tally})
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.kind == "uniform":
        if args.m is None:
            raise CommandError("--kind uniform needs --m")
        g = generate_uniform(args.n, args.m, args.seed)
    else:
        if args.gamma is None:
            raise CommandError("--kind powerlaw needs --gamma")
        g = generate_powerlaw(args.n, args.gamma, args.seed, args.sampler)
    buf = io.StringIO()
    write_edge_list(g, buf)
    if args.out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        atomic_write(Path(args.out), buf.getvalue())
    log.info("generated %s graph: n=%d m=%d", args.kind, g.node_count, g.edge_count)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clanforge", description="Friendship-network analysis for MMORPG data.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_required: bool):
        p.add_argument("edges", help="edge-list file ('-' for stdin)")
        p.add_argument("--metadata", help="player metadata CSV")
        p.add_argument("--out-dir", default=".", help="directory for report files")
        p.add_argument("--seed", type=int, required=seed_required)

    p = sub.add_parser("analyze", help="structural summary and degree-distribution plot data")
    common(p, seed_required=True)
    p.add_argument("--xmin", type=int, default=1)
    p.add_argument("--path-mode", choices=("auto", "exact", "sampled"), default="auto")
    p.add_argument("--sample-sources", type=int, default=200)
    p.add_argument("--exact-limit", type=int, default=metrics.EXACT_PATH_LIMIT)
    p.add_argument("--path-factor", type=float, default=2.0)
    p.add_argument("--clustering-factor", type=float, default=10.0)
    p.add_argument("--centrality", action="store_true", help="also write pagerank.csv and betweenness.csv")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("groups", help="hardcore/casual/peripheral cohorts")
    common(p, seed_required=False)
    p.add_argument("--method", choices=("alg1", "pagerank", "betweenness"), default="alg1")
    p.add_argument("--strict", action="store_true", help="stop when SCC size is not strictly larger")
    p.add_argument("--hardcore-fraction", type=float, default=0.07)
    p.add_argument("--peripheral-fraction", type=float, default=0.14)
    p.add_argument("--correlate", action="store_true", help="require correlations (needs --metadata)")
    p.add_argument("--count-nonplayers", action="store_true",
                   help="count characters outside the network as peripheral")
    p.set_defaults(func=cmd_groups)

    p = sub.add_parser("communities", help="map-equation communities and NMI against clans")
    common(p, seed_required=True)
    p.add_argument("--teleport", type=float, default=0.15)
    p.add_argument("--clanless", choices=("singleton", "block"), default="singleton")
    p.add_argument("--normalization", choices=("arithmetic", "max"), default="arithmetic")
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("recommend", help="recommend clans to clanless players")
    common(p, seed_required=True)
    p.add_argument("--max-clan-size", type=int, required=True)
    p.add_argument("--points-balance", type=float)
    p.add_argument("--clan-points", help="CSV with clan_id,points")
    p.add_argument("--max-rounds", type=int, default=100)
    p.add_argument("--player", type=int)
    p.add_argument("--teleport", type=float, default=0.15)
    p.add_argument("--reuse-partition", action="store_true",
                   help="restrict the original communities instead of re-detecting after removals")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("generate", help="write a synthetic edge list")
    p.add_argument("--kind", choices=("uniform", "powerlaw"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--sampler", choices=("pareto", "zeta"), default="pareto")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "metadata", None) is None and args.command == "recommend":
        parser.error("recommend requires --metadata")
    try:
        return args.func(args)
    except (CommandError, ValueError, KeyError) as exc:
        print(f"clanforge: error: {str(exc).strip(chr(39))}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
