#!/usr/bin/env python3
"""Run the whole pipeline end to end on a bundled synthetic match.

Generates Metrica-layout CSVs, converts them to an OCEL 2.0 JSON log,
prints summary statistics, discovers directly-follows graphs, and renders
one possession as SVG.  Everything is deterministic: rerunning into the
same directory reproduces byte-identical artifacts.

Usage: python3 scripts/demo_pipeline.py [--out-dir DIR] [--real DATA_DIR]

With --real pointing at a data/metrica directory (see fetch_metrica.py)
the demo runs on the first sample match instead of synthetic data.
"""

import argparse
import sys
from pathlib import Path

from footocel.mining import discover_ocdfg
from footocel.ocel import stats, write_ocel_json
from footocel.pipeline import MatchPaths, RunConfig, convert_matches
from footocel.render import dfg_to_dot, spatial_instance_svg
from footocel.synth import write_synth_match


def real_match(data_dir: Path) -> MatchPaths:
    base = data_dir / "Sample_Game_1"
    paths = MatchPaths(
        str(base / "Sample_Game_1_RawTrackingData_Home_Team.csv"),
        str(base / "Sample_Game_1_RawTrackingData_Away_Team.csv"),
        str(base / "Sample_Game_1_RawEventsData.csv"),
        "game1",
    )
    for p in (paths.home_tracking, paths.away_tracking, paths.events):
        if not Path(p).is_file():
            raise FileNotFoundError(p)
    return paths


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="demo_output", metavar="DIR")
    parser.add_argument("--real", metavar="DATA_DIR",
                        help="use Sample_Game_1 from this data/metrica directory")
    args = parser.parse_args(argv)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    if args.real:
        match = real_match(Path(args.real))
        print(f"using the first sample match from {args.real}")
    else:
        raw_dir = out / "raw"
        raw_dir.mkdir(exist_ok=True)
        home, away, events = write_synth_match(raw_dir, prefix="demo")
        match = MatchPaths(str(home), str(away), str(events), "game1")
        print(f"generated synthetic match under {raw_dir}")

    config = RunConfig()
    log, spans_by_match = convert_matches([match], config)

    log_path = out / "log.json"
    write_ocel_json(log, str(log_path))
    print(f"wrote {log_path}")

    summary = stats(log)
    (out / "stats.txt").write_text(summary.to_text() + "\n")
    print(summary.to_text())

    dfg = discover_ocdfg(log, ["ball", "player", "team", "possession"])
    dot_path = out / "dfg_multi_type.dot"
    dot_path.write_text(dfg_to_dot(dfg))
    print(f"wrote {dot_path} (render with: dot -Tsvg {dot_path})")

    spans = spans_by_match[match.match_id]
    goal_spans = [s for s in spans if s.outcome == "goal"] or spans
    pid = goal_spans[0].span_id
    svg_path = out / f"possession_{pid}.svg"
    svg_path.write_text(spatial_instance_svg(log, pid, ["ball", "player"], config.grid))
    print(f"wrote {svg_path} ({goal_spans[0].team} possession, "
          f"outcome {goal_spans[0].outcome})")

    per_type = dfg.per_type["ball"]
    top_edges = sorted(per_type.edge_counts.items(), key=lambda kv: -kv[1])[:5]
    print("most frequent ball-type directly-follows edges:")
    for (a, b), count in top_edges:
        print(f"  {a} -> {b}: {count}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
