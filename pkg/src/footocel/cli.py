"""Command line interface.

Subcommands: convert (files -> OCEL JSON), stats (summarize a log),
possessions (print segmented spans), dfg (discover + render a
directly-follows graph), spatial (render one possession's traces as SVG).

Option precedence everywhere: explicit flags beat the --config JSON file,
which beats built-in defaults.  Exit codes: 0 success, 1 unreadable or
unresolvable input (parse errors, unknown ids/attributes), 2 violated
invariants (inconsistent files, bad configuration).
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .errors import ConsistencyError, ParseError, QueryError
from .ingest import load_match
from .mining import LogFilter, discover_ocdfg, filter_log
from .ocel import (
    OBJECT_TYPE_GRID,
    IdentityScope,
    OcelLog,
    read_ocel_json,
    stats,
    write_ocel_json,
)
from .pipeline import (
    MatchPaths,
    RunConfig,
    convert_matches,
    load_config_file,
    merge_config,
)
from .possession import match_prefix, segment_possessions
from .render import RenderOptions, dfg_to_dot, spatial_instance_svg
from .spatial import GridSpec


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("pipeline configuration")
    g.add_argument("--config", metavar="JSON", help="config file; flags override it")
    g.add_argument("--grid-cols", type=int, metavar="N")
    g.add_argument("--grid-rows", type=int, metavar="N")
    g.add_argument("--pitch-length", type=float, metavar="M", help="pitch length in meters")
    g.add_argument("--pitch-width", type=float, metavar="M", help="pitch width in meters")
    g.add_argument("--sample-rate", type=float, metavar="HZ", help="tracking frames per second")
    g.add_argument("--min-dwell", type=float, metavar="S",
                   help="debounce: min seconds in a new cell before a movement event")
    g.add_argument("--normalize-direction", action="store_const", const=True, default=None,
                   help="flip all period-2 coordinates so attack directions stay constant")
    g.add_argument("--scope", choices=[s.value for s in IdentityScope],
                   help="share team/player/ball/grid objects across matches or not")
    g.add_argument("--activity-map", metavar="JSON",
                   help="replace the built-in provider-type -> activity table")
    g.add_argument("--unknown-events", choices=["reject", "pass"],
                   help="reject unmapped event types (default) or pass them through")
    g.add_argument("--control-types", metavar="CSV",
                   help="comma-separated event types that establish possession")
    g.add_argument("--jobs", type=int, metavar="N", help="matches converted in parallel")


def _add_match_options(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("match inputs")
    g.add_argument("--match", nargs=3, action="append", metavar=("HOME", "AWAY", "EVENTS"),
                   help="one match's home tracking, away tracking and events CSVs (repeatable)")
    g.add_argument("--match-ids", metavar="CSV",
                   help="comma-separated ids aligned with --match (default game1,game2,...)")


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    base = load_config_file(args.config) if args.config else RunConfig()
    grid = None
    grid_flags = (args.grid_cols, args.grid_rows, args.pitch_length, args.pitch_width)
    if any(v is not None for v in grid_flags):
        grid = GridSpec(
            cols=args.grid_cols if args.grid_cols is not None else base.grid.cols,
            rows=args.grid_rows if args.grid_rows is not None else base.grid.rows,
            pitch_length_m=args.pitch_length if args.pitch_length is not None
            else base.grid.pitch_length_m,
            pitch_width_m=args.pitch_width if args.pitch_width is not None
            else base.grid.pitch_width_m,
        )
    control = None
    if args.control_types is not None:
        control = tuple(t.strip() for t in args.control_types.split(",") if t.strip())
    return merge_config(
        base,
        grid=grid,
        sample_rate=args.sample_rate,
        min_dwell_s=args.min_dwell,
        normalize_direction=args.normalize_direction,
        scope=IdentityScope(args.scope) if args.scope else None,
        activity_map_path=args.activity_map,
        unknown_events=args.unknown_events,
        control_types=control,
        jobs=args.jobs,
    )


def _resolve_matches(args: argparse.Namespace, parser: argparse.ArgumentParser) -> list[MatchPaths]:
    if not args.match:
        parser.error("at least one --match HOME AWAY EVENTS is required")
    if args.match_ids:
        ids = [m.strip() for m in args.match_ids.split(",")]
        if len(ids) != len(args.match):
            parser.error(f"--match-ids names {len(ids)} matches but {len(args.match)} given")
    else:
        ids = [f"game{i + 1}" for i in range(len(args.match))]
    return [
        MatchPaths(home, away, events, mid)
        for (home, away, events), mid in zip(args.match, ids)
    ]


def _parse_where(clauses: Sequence[str], parser: argparse.ArgumentParser) -> list[tuple[str, str, str]]:
    out = []
    for clause in clauses:
        head, eq, value = clause.partition("=")
        otype, dot, attr = head.partition(".")
        if not eq or not dot or not otype or not attr:
            parser.error(f"--where must look like TYPE.ATTR=VALUE, got {clause!r}")
        out.append((otype, attr, value))
    return out


def _load_or_convert(args: argparse.Namespace, parser: argparse.ArgumentParser) -> OcelLog:
    if args.ocel and args.match:
        parser.error("give either --ocel or --match inputs, not both")
    if args.ocel:
        return read_ocel_json(args.ocel)
    if args.match:
        log, _ = convert_matches(_resolve_matches(args, parser), _resolve_config(args))
        return log
    parser.error("an --ocel file or --match inputs are required")


def _grid_from_log(log: OcelLog, fallback: GridSpec) -> GridSpec:
    """Recover grid dimensions from the log's grid objects."""
    cols = rows = 0
    for o in log.objects:
        if o.otype == OBJECT_TYPE_GRID:
            cols = max(cols, ord(str(o.attrs.get("column", "A"))[0]) - ord("A") + 1)
            rows = max(rows, int(o.attrs.get("row", 1)))
    if cols and rows:
        return GridSpec(cols=cols, rows=rows,
                        pitch_length_m=fallback.pitch_length_m,
                        pitch_width_m=fallback.pitch_width_m)
    return fallback


def _write_text(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_convert(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _resolve_config(args)
    matches = _resolve_matches(args, parser)
    log, _ = convert_matches(matches, config)
    write_ocel_json(log, args.out)
    print(stats(log).to_text())
    print(f"wrote {args.out}")
    return 0


def cmd_stats(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    print(stats(read_ocel_json(args.ocel)).to_text())
    return 0


def cmd_possessions(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _resolve_config(args)
    matches = _resolve_matches(args, parser)
    for index, m in enumerate(matches):
        bundle = load_match(m.home_tracking, m.away_tracking, m.events,
                            match_id=m.match_id, sample_rate=config.sample_rate)
        spans = segment_possessions(
            bundle.events, match_prefix(index), frozenset(config.control_types))
        for s in spans:
            print(f"{s.span_id}\t{s.team}\t{s.start_time_s}\t{s.end_time_s}\t{s.outcome}")
    return 0


def _render_options(args: argparse.Namespace) -> RenderOptions:
    return RenderOptions(
        node_labels=not args.no_node_labels,
        edge_labels=not args.no_edge_labels,
    )


def cmd_dfg(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    log = _load_or_convert(args, parser)
    by_type: dict[str, list[tuple[str, str]]] = {}
    for otype, attr, value in _parse_where(args.where or [], parser):
        by_type.setdefault(otype, []).append((attr, value))
    for otype, conditions in by_type.items():
        log = filter_log(log, LogFilter(object_type=otype, where=tuple(conditions)))
    types = [t.strip() for t in args.types.split(",") if t.strip()]
    if not types:
        parser.error("--types must name at least one object type")
    dfg = discover_ocdfg(log, types)
    _write_text(dfg_to_dot(dfg, _render_options(args)), args.out)
    return 0


def cmd_spatial(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    log = _load_or_convert(args, parser)
    types = [t.strip() for t in args.types.split(",") if t.strip()]
    if not types:
        parser.error("--types must name at least one object type")
    grid = _grid_from_log(log, _resolve_config(args).grid)
    svg = spatial_instance_svg(log, args.possession, types, grid)
    _write_text(svg, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="footocel",
        description="Convert football tracking + event feeds into object-centric "
                    "event logs; segment possessions, discover directly-follows "
                    "graphs and render spatial possession maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert matches to an OCEL JSON log")
    _add_match_options(p)
    _add_config_options(p)
    p.add_argument("--out", required=True, metavar="JSON", help="output log path")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("stats", help="summarize an OCEL JSON log")
    p.add_argument("--ocel", required=True, metavar="JSON")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("possessions", help="segment and print possession spans")
    _add_match_options(p)
    _add_config_options(p)
    p.set_defaults(func=cmd_possessions)

    p = sub.add_parser("dfg", help="discover a directly-follows graph, emit DOT")
    p.add_argument("--ocel", metavar="JSON", help="an existing log (or give --match inputs)")
    _add_match_options(p)
    _add_config_options(p)
    p.add_argument("--types", default="ball", metavar="CSV",
                   help="object types to discover graphs for (default: ball)")
    p.add_argument("--where", action="append", metavar="TYPE.ATTR=VALUE",
                   help="keep events related to a matching object (repeatable)")
    p.add_argument("--no-node-labels", action="store_true",
                   help="plain activity names without per-type counts")
    p.add_argument("--no-edge-labels", action="store_true",
                   help="edges without '<type>:<count>' labels")
    p.add_argument("--out", metavar="DOT", help="output path (default: stdout)")
    p.set_defaults(func=cmd_dfg)

    p = sub.add_parser("spatial", help="render one possession's traces as SVG")
    p.add_argument("--ocel", metavar="JSON", help="an existing log (or give --match inputs)")
    _add_match_options(p)
    _add_config_options(p)
    p.add_argument("--possession", required=True, metavar="ID", help="possession object id")
    p.add_argument("--types", default="ball,player", metavar="CSV",
                   help="object types to draw (default: ball,player)")
    p.add_argument("--out", metavar="SVG", help="output path (default: stdout)")
    p.set_defaults(func=cmd_spatial)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (ParseError, QueryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConsistencyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
