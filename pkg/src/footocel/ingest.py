"""Readers for the provider's raw match files.

A match arrives as three CSVs: one tracking file per side plus one shared
event file.  Tracking files carry a 3-line header (team name row, jersey
row, column-title row) followed by 25 Hz frames; every player contributes
an x/y column pair and the final pair is the ball.  Event rows are discrete
on-ball/game actions with start/end frames, times and positions.

Player identity: tracking column titles and event From/To fields use bare
tokens like "Player9" that are only unique within a side, so every label is
qualified with its side ("HomePlayer9") as soon as it leaves the raw record.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

from .errors import ConsistencyError, ParseError
from .spatial import Point

SIDES = ("Home", "Away")

TRACKING_TITLE_PREFIX = ("Period", "Frame", "Time [s]")

EVENTS_HEADER = [
    "Team", "Type", "Subtype", "Period",
    "Start Frame", "Start Time [s]", "End Frame", "End Time [s]",
    "From", "To", "Start X", "Start Y", "End X", "End Y",
]

# agreement tolerance for values that two files must both report
FLOAT_TOLERANCE = 1e-6


@dataclass(frozen=True)
class TrackingFrame:
    """One 25 Hz snapshot: qualified player label -> position (None = not tracked)."""

    period: int
    frame: int
    time_s: float
    positions: Mapping[str, Optional[Point]]
    ball: Optional[Point]


@dataclass(frozen=True)
class RawEventRecord:
    """One provider event row, values preserved verbatim (players unqualified)."""

    team: str
    event_type: str
    subtype: Optional[str]
    period: int
    start_frame: int
    start_time_s: float
    end_frame: int
    end_time_s: float
    from_player: Optional[str]
    to_player: Optional[str]
    start_pos: Optional[Point]
    end_pos: Optional[Point]


@dataclass
class MatchBundle:
    """Everything known about one match after loading and merging."""

    match_id: str
    frames: list[TrackingFrame]
    events: list[RawEventRecord]
    rosters: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def roster_side(self, qualified_label: str) -> str:
        for side, labels in self.rosters.items():
            if qualified_label in labels:
                return side
        raise ConsistencyError(f"player {qualified_label!r} missing from all rosters")


def qualify_player(side: str, token: str) -> str:
    """Side-qualified player label, e.g. ("Home", "Player9") -> "HomePlayer9"."""
    return f"{side}{token}"


def _opt_float(token: str, *, source: str, line: int, what: str) -> Optional[float]:
    """Parse an optional numeric field: blank or NaN mean absent."""
    token = token.strip()
    if not token:
        return None
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric {what} {token!r}", source=source, line=line) from None
    if math.isnan(value):
        return None
    if math.isinf(value):
        raise ParseError(f"non-finite {what} {token!r}", source=source, line=line)
    return value


def _req_int(token: str, *, source: str, line: int, what: str) -> int:
    try:
        return int(token.strip())
    except ValueError:
        raise ParseError(f"non-numeric {what} {token!r}", source=source, line=line) from None


def _req_float(token: str, *, source: str, line: int, what: str) -> float:
    value = _opt_float(token, source=source, line=line, what=what)
    if value is None:
        raise ParseError(f"missing {what}", source=source, line=line)
    return value


def _opt_pair(xs: str, ys: str, *, source: str, line: int, what: str) -> Optional[Point]:
    x = _opt_float(xs, source=source, line=line, what=f"{what} x")
    y = _opt_float(ys, source=source, line=line, what=f"{what} y")
    if (x is None) != (y is None):
        raise ParseError(f"half-present coordinate pair for {what}", source=source, line=line)
    if x is None:
        return None
    return Point(x, y)


def parse_tracking(
    lines: Iterable[str],
    side: str,
    sample_rate: float = 25.0,
    source: str = "<tracking>",
) -> list[TrackingFrame]:
    """Parse one side's tracking file into frame fragments.

    Fragments hold only this side's players (labels already qualified) plus
    the ball; merge_tracking joins the two sides.  The header is validated
    structurally and every data row is checked for field count, numeric
    sanity, strictly increasing frame numbers and time = frame / sample_rate.
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    reader = csv.reader(lines)
    header = []
    for row in reader:
        header.append(row)
        if len(header) == 3:
            break
    if len(header) < 3:
        raise ParseError("truncated header: expected 3 header lines", source=source, line=len(header))
    titles = [t.strip() for t in header[2]]
    if tuple(titles[:3]) != TRACKING_TITLE_PREFIX:
        raise ParseError(
            f"column-title row must start with {','.join(TRACKING_TITLE_PREFIX)}",
            source=source, line=3,
        )
    if (len(titles) - 3) % 2 != 0:
        raise ParseError("odd coordinate column count", source=source, line=3)
    n_pairs = (len(titles) - 3) // 2
    if n_pairs < 1:
        raise ParseError("no coordinate columns (not even a ball pair)", source=source, line=3)
    pair_tokens = [titles[3 + 2 * k] for k in range(n_pairs)]
    if pair_tokens[-1].lower() != "ball":
        raise ParseError(
            f"last coordinate pair must be titled Ball, got {pair_tokens[-1]!r}",
            source=source, line=3,
        )
    for token in pair_tokens[:-1]:
        if not token:
            raise ParseError("unnamed player coordinate pair", source=source, line=3)
    labels = [qualify_player(side, token) for token in pair_tokens[:-1]]

    frames: list[TrackingFrame] = []
    width = len(titles)
    prev_frame: Optional[int] = None
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # stray blank line
        if len(row) != width:
            raise ParseError(
                f"expected {width} fields, got {len(row)}", source=source, line=line,
            )
        period = _req_int(row[0], source=source, line=line, what="period")
        if period < 1:
            raise ParseError(f"period must be >= 1, got {period}", source=source, line=line)
        frame = _req_int(row[1], source=source, line=line, what="frame")
        time_s = _req_float(row[2], source=source, line=line, what="time")
        if prev_frame is not None and frame <= prev_frame:
            raise ParseError(
                f"frame {frame} not greater than previous frame {prev_frame}",
                source=source, line=line,
            )
        prev_frame = frame
        if abs(time_s - frame / sample_rate) > FLOAT_TOLERANCE:
            raise ParseError(
                f"time {time_s} inconsistent with frame {frame} at {sample_rate} Hz",
                source=source, line=line,
            )
        positions: dict[str, Optional[Point]] = {}
        for k, label in enumerate(labels):
            positions[label] = _opt_pair(
                row[3 + 2 * k], row[4 + 2 * k], source=source, line=line, what=label,
            )
        ball = _opt_pair(row[width - 2], row[width - 1], source=source, line=line, what="ball")
        frames.append(TrackingFrame(period, frame, time_s, positions, ball))
    return frames


def merge_tracking(home: list[TrackingFrame], away: list[TrackingFrame]) -> list[TrackingFrame]:
    """Join the two sides' fragments into full frames.

    Both files must describe exactly the same frame sequence; the first
    diverging frame is reported.  Ball positions may come from either file
    and must agree where both report one.
    """
    merged: list[TrackingFrame] = []
    for i in range(max(len(home), len(away))):
        if i >= len(home):
            raise ConsistencyError(f"frame {away[i].frame} missing from home tracking")
        if i >= len(away):
            raise ConsistencyError(f"frame {home[i].frame} missing from away tracking")
        h, a = home[i], away[i]
        if h.frame != a.frame:
            raise ConsistencyError(f"frame mismatch: home has {h.frame}, away has {a.frame}")
        if h.period != a.period:
            raise ConsistencyError(f"period mismatch at frame {h.frame}")
        if abs(h.time_s - a.time_s) > FLOAT_TOLERANCE:
            raise ConsistencyError(f"time mismatch at frame {h.frame}")
        overlap = h.positions.keys() & a.positions.keys()
        if overlap:
            raise ConsistencyError(f"duplicate player labels across sides: {sorted(overlap)}")
        ball = h.ball
        if h.ball is not None and a.ball is not None:
            if (abs(h.ball.x - a.ball.x) > FLOAT_TOLERANCE
                    or abs(h.ball.y - a.ball.y) > FLOAT_TOLERANCE):
                raise ConsistencyError(f"ball position disagreement at frame {h.frame}")
        elif h.ball is None:
            ball = a.ball
        positions = dict(h.positions)
        positions.update(a.positions)
        merged.append(TrackingFrame(h.period, h.frame, h.time_s, positions, ball))
    return merged


def parse_events(lines: Iterable[str], source: str = "<events>") -> list[RawEventRecord]:
    """Parse the shared event file.

    The 14-column header is matched exactly.  Rows come back stably sorted
    by start time (file order preserved among ties); values are kept
    verbatim so that events_to_csv round-trips.
    """
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file: missing header", source=source, line=1) from None
    if [h.strip() for h in header] != EVENTS_HEADER:
        raise ParseError(
            f"unexpected header: expected {','.join(EVENTS_HEADER)}", source=source, line=1,
        )
    records: list[RawEventRecord] = []
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(EVENTS_HEADER):
            raise ParseError(
                f"expected {len(EVENTS_HEADER)} fields, got {len(row)}", source=source, line=line,
            )
        team = row[0].strip()
        if team not in SIDES:
            raise ParseError(f"unknown team {team!r}", source=source, line=line)
        event_type = row[1].strip()
        if not event_type:
            raise ParseError("missing event type", source=source, line=line)
        subtype = row[2].strip() or None
        period = _req_int(row[3], source=source, line=line, what="period")
        if period < 1:
            raise ParseError(f"period must be >= 1, got {period}", source=source, line=line)
        start_frame = _req_int(row[4], source=source, line=line, what="start frame")
        start_time = _req_float(row[5], source=source, line=line, what="start time")
        end_frame = _req_int(row[6], source=source, line=line, what="end frame")
        end_time = _req_float(row[7], source=source, line=line, what="end time")
        if end_time < start_time:
            raise ParseError(
                f"end time {end_time} before start time {start_time}", source=source, line=line,
            )
        from_player = row[8].strip() or None
        to_player = row[9].strip() or None
        start_pos = _opt_pair(row[10], row[11], source=source, line=line, what="start position")
        end_pos = _opt_pair(row[12], row[13], source=source, line=line, what="end position")
        records.append(RawEventRecord(
            team, event_type, subtype, period,
            start_frame, start_time, end_frame, end_time,
            from_player, to_player, start_pos, end_pos,
        ))
    records.sort(key=lambda r: r.start_time_s)  # stable: file order breaks ties
    return records


def _fmt_opt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def events_to_csv(records: Iterable[RawEventRecord]) -> str:
    """Serialize records back to the provider layout (field-lossless)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(EVENTS_HEADER)
    for r in records:
        writer.writerow([
            r.team, r.event_type, _fmt_opt(r.subtype), r.period,
            r.start_frame, _fmt_opt(r.start_time_s), r.end_frame, _fmt_opt(r.end_time_s),
            _fmt_opt(r.from_player), _fmt_opt(r.to_player),
            _fmt_opt(r.start_pos.x if r.start_pos else None),
            _fmt_opt(r.start_pos.y if r.start_pos else None),
            _fmt_opt(r.end_pos.x if r.end_pos else None),
            _fmt_opt(r.end_pos.y if r.end_pos else None),
        ])
    return buf.getvalue()


def load_match(
    home_tracking_path,
    away_tracking_path,
    events_path,
    match_id: str,
    sample_rate: float = 25.0,
) -> MatchBundle:
    """Load and merge one match's three files.

    Rosters start from the tracking column titles and are extended by any
    player label an event references (tolerates event-only data slices).
    """
    with open(home_tracking_path, newline="") as fh:
        home = parse_tracking(fh, "Home", sample_rate, source=str(home_tracking_path))
    with open(away_tracking_path, newline="") as fh:
        away = parse_tracking(fh, "Away", sample_rate, source=str(away_tracking_path))
    frames = merge_tracking(home, away)
    with open(events_path, newline="") as fh:
        events = parse_events(fh, source=str(events_path))

    rosters: dict[str, set[str]] = {side: set() for side in SIDES}
    if home:
        rosters["Home"].update(home[0].positions.keys())
    if away:
        rosters["Away"].update(away[0].positions.keys())
    for record in events:
        for token in (record.from_player, record.to_player):
            if token is not None:
                rosters[record.team].add(qualify_player(record.team, token))
    return MatchBundle(
        match_id=match_id,
        frames=frames,
        events=events,
        rosters={side: tuple(sorted(labels)) for side, labels in rosters.items()},
    )


def normalize_direction(
    frames: list[TrackingFrame], events: list[RawEventRecord]
) -> tuple[list[TrackingFrame], list[RawEventRecord]]:
    """Flip every period-2 position (x,y) -> (1-x, 1-y).

    Sides swap ends at half time while raw coordinates stay absolute; the
    flip applies to all objects at once so each team attacks a constant
    direction and relative geometry is preserved.
    """
    def flip(p: Optional[Point]) -> Optional[Point]:
        return None if p is None else Point(1.0 - p.x, 1.0 - p.y)

    out_frames = []
    for f in frames:
        if f.period < 2:
            out_frames.append(f)
        else:
            out_frames.append(TrackingFrame(
                f.period, f.frame, f.time_s,
                {label: flip(p) for label, p in f.positions.items()},
                flip(f.ball),
            ))
    out_events = []
    for e in events:
        if e.period < 2:
            out_events.append(e)
        else:
            out_events.append(replace(e, start_pos=flip(e.start_pos), end_pos=flip(e.end_pos)))
    return out_frames, out_events
