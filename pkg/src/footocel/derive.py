"""Turn raw records and tracking frames into a single activity-event stream.

Three event classes flow through the pipeline:

* game_based - off-ball game events (challenges, cards, fouls suffered)
* ball       - on-ball actions (passes, shots, set pieces, recoveries, ...)
* position_based - "Player changes position" events derived from tracking
  whenever a player crosses a grid-cell border

Raw provider rows map through a configurable activity table: each row emits
a primary event at its start, and rows that encode a distinct outcome add
an end event (a pass emits "Pass received" at its end position, a
goal-marked shot emits "Goal" at the shot's end time).  Ball-out rows emit
their single "Ball out" event at the end fields, where the ball actually
crossed the line.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources
from typing import Optional, Sequence

from .errors import ConsistencyError, ParseError
from .ingest import RawEventRecord, TrackingFrame, qualify_player
from .possession import PossessionSpan, goal_marked, possession_at
from .spatial import GridCell, GridSpec, Point, cell_label, cell_of, metric_distance

GAME_BASED = "game_based"
BALL = "ball"
POSITION_BASED = "position_based"
EVENT_CLASSES = frozenset({GAME_BASED, BALL, POSITION_BASED})

MOVEMENT_ACTIVITY = "Player changes position"
GOAL_ACTIVITY = "Goal"

EXECUTING = "executing_player"
RECEIVING = "receiving_player"

UNKNOWN_REJECT = "reject"
UNKNOWN_PASS = "pass"


@dataclass(frozen=True)
class MappingEntry:
    """How one provider event type decomposes into activity events."""

    activity: str
    end_activity: Optional[str] = None
    goal_end_activity: Optional[str] = None
    event_class: str = BALL
    at_end: bool = False  # emit the (single) primary event at the end fields

    def __post_init__(self) -> None:
        if self.event_class not in (GAME_BASED, BALL):
            raise ValueError(f"mapped class must be game_based or ball, got {self.event_class!r}")


@dataclass(frozen=True)
class ActivityEvent:
    """One event of the unified stream (pre- or post-merge)."""

    activity: str
    event_class: str
    time_s: float
    period: int
    team: Optional[str]
    players: tuple[str, ...]           # qualified labels, executor first
    roles: tuple[str, ...]             # parallel qualifiers for players
    position: Optional[Point]
    cell: Optional[GridCell]
    attrs: dict
    event_id: Optional[str] = None     # assigned by merge_streams


def default_activity_mapping() -> dict[str, MappingEntry]:
    """The packaged provider-type -> activity table."""
    text = resources.files("footocel").joinpath("data/activity_map.json").read_text()
    return _mapping_from_dict(json.loads(text), source="<packaged activity map>")


def load_activity_mapping(path) -> dict[str, MappingEntry]:
    """Load a user-supplied activity table (same schema as the packaged one)."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}", source=str(path)) from None
    return _mapping_from_dict(data, source=str(path))


_MAPPING_KEYS = {"activity", "end_activity", "goal_end_activity", "class", "at_end"}


def _mapping_from_dict(data, source: str) -> dict[str, MappingEntry]:
    if not isinstance(data, dict):
        raise ParseError("activity map must be a JSON object", source=source)
    mapping: dict[str, MappingEntry] = {}
    for provider_type, raw in data.items():
        if not isinstance(raw, dict):
            raise ParseError(f"entry {provider_type!r} must be an object", source=source)
        unknown = set(raw) - _MAPPING_KEYS
        if unknown:
            raise ParseError(
                f"entry {provider_type!r} has unknown keys {sorted(unknown)}", source=source,
            )
        if "activity" not in raw or not isinstance(raw["activity"], str):
            raise ParseError(f"entry {provider_type!r} needs a string 'activity'", source=source)
        try:
            mapping[provider_type] = MappingEntry(
                activity=raw["activity"],
                end_activity=raw.get("end_activity"),
                goal_end_activity=raw.get("goal_end_activity"),
                event_class=raw.get("class", BALL),
                at_end=bool(raw.get("at_end", False)),
            )
        except ValueError as exc:
            raise ParseError(f"entry {provider_type!r}: {exc}", source=source) from None
    return mapping


def snap_to_pitch(p: Optional[Point]) -> Optional[Point]:
    """Clamp a position into the unit square (off-pitch points keep their
    raw value everywhere else; only cell mapping needs in-range input)."""
    if p is None:
        return None
    return Point(min(max(p.x, 0.0), 1.0), min(max(p.y, 0.0), 1.0))


def _cell(p: Optional[Point], spec: GridSpec) -> Optional[GridCell]:
    snapped = snap_to_pitch(p)
    return None if snapped is None else cell_of(snapped, spec)


def decompose_events(
    raw: Sequence[RawEventRecord],
    spec: GridSpec,
    mapping: Optional[dict[str, MappingEntry]] = None,
    on_unknown: str = UNKNOWN_REJECT,
) -> list[ActivityEvent]:
    """Map raw records to activity events (one or two per record).

    Unknown provider types either abort (default) or pass through with an
    "Other:<TYPE>" label, depending on on_unknown.  Output is time-ordered;
    within one record the primary event precedes its end event.
    """
    if on_unknown not in (UNKNOWN_REJECT, UNKNOWN_PASS):
        raise ValueError(f"on_unknown must be 'reject' or 'pass', got {on_unknown!r}")
    if mapping is None:
        mapping = default_activity_mapping()

    out: list[ActivityEvent] = []
    for record in raw:
        entry = mapping.get(record.event_type)
        if entry is None:
            if on_unknown == UNKNOWN_REJECT:
                raise ConsistencyError(
                    f"unknown event type {record.event_type!r}"
                    " (extend the activity map or run with unknown events passed through)"
                )
            entry = MappingEntry(activity=f"Other:{record.event_type}", event_class=GAME_BASED)

        executor = (
            qualify_player(record.team, record.from_player) if record.from_player else None
        )
        receiver = (
            qualify_player(record.team, record.to_player) if record.to_player else None
        )

        attrs: dict = {}
        if record.subtype:
            attrs["subtype"] = record.subtype
        attrs["duration_s"] = record.end_time_s - record.start_time_s
        if record.start_pos is not None and record.end_pos is not None:
            attrs["distance_m"] = metric_distance(record.start_pos, record.end_pos, spec)

        if entry.at_end:
            time_s, pos = record.end_time_s, record.end_pos or record.start_pos
        else:
            time_s, pos = record.start_time_s, record.start_pos

        players: tuple[str, ...] = ()
        roles: tuple[str, ...] = ()
        if executor is not None:
            players += (executor,)
            roles += (EXECUTING,)
        if receiver is not None and entry.end_activity is not None:
            # the receiving side matters on the primary event too (a pass
            # connects both players)
            players += (receiver,)
            roles += (RECEIVING,)

        out.append(ActivityEvent(
            activity=entry.activity,
            event_class=entry.event_class,
            time_s=time_s,
            period=record.period,
            team=record.team,
            players=players,
            roles=roles,
            position=pos,
            cell=_cell(pos, spec),
            attrs=attrs,
        ))

        if entry.end_activity is not None and receiver is not None:
            out.append(ActivityEvent(
                activity=entry.end_activity,
                event_class=entry.event_class,
                time_s=record.end_time_s,
                period=record.period,
                team=record.team,
                players=(receiver,),
                roles=(RECEIVING,),
                position=record.end_pos,
                cell=_cell(record.end_pos, spec),
                attrs=dict(attrs),
            ))
        if entry.goal_end_activity is not None and goal_marked(record.subtype):
            out.append(ActivityEvent(
                activity=entry.goal_end_activity,
                event_class=entry.event_class,
                time_s=record.end_time_s,
                period=record.period,
                team=record.team,
                players=(executor,) if executor else (),
                roles=(EXECUTING,) if executor else (),
                position=record.end_pos,
                cell=_cell(record.end_pos, spec),
                attrs=dict(attrs),
            ))

    out.sort(key=lambda e: (e.period, e.time_s))  # stable: record order breaks ties
    return out


def detect_movement_events(
    frames: Sequence[TrackingFrame],
    spec: GridSpec,
    min_dwell_s: float = 0.0,
) -> list[ActivityEvent]:
    """Emit "Player changes position" events from cell-border crossings.

    An event fires at the first frame inside the new cell and carries the
    previous cell, the new cell, the dwell time in the previous cell and
    the metric path length walked since the previous change.  A player's
    first observed cell emits nothing, tracking gaps reset the cell memory
    only when the player reappears somewhere else, and state resets at
    period boundaries (sides switch ends at half time).

    min_dwell_s > 0 debounces border jitter: a crossing only counts once
    the player has stayed out of the old cell, inside one new cell, for at
    least that long; the event keeps the first-frame-in-new-cell timestamp.
    """
    if min_dwell_s < 0:
        raise ValueError("min_dwell_s must be >= 0")

    labels = sorted({label for f in frames for label in f.positions})
    events: list[ActivityEvent] = []

    for label in labels:
        confirmed: Optional[GridCell] = None
        entry_time = 0.0
        acc = 0.0                      # path length since entering `confirmed`
        last_point: Optional[Point] = None
        prev_present = False
        last_period: Optional[int] = None
        tentative: Optional[tuple[GridCell, float, float]] = None  # cell, t0, acc snapshot

        for f in frames:
            if f.period != last_period:
                confirmed = None
                tentative = None
                last_point = None
                prev_present = False
                acc = 0.0
                last_period = f.period
            p = f.positions.get(label)
            if p is None:
                prev_present = False
                continue
            cell = _cell(p, spec)

            if confirmed is None:
                confirmed, entry_time, acc, tentative = cell, f.time_s, 0.0, None
            elif not prev_present:
                # back after a gap: same cell continues the residence,
                # anywhere else silently resets the memory
                tentative = None
                if cell == confirmed:
                    acc += metric_distance(last_point, p, spec)
                else:
                    confirmed, entry_time, acc = cell, f.time_s, 0.0
            else:
                acc += metric_distance(last_point, p, spec)
                if cell == confirmed:
                    tentative = None
                else:
                    if tentative is None or cell != tentative[0]:
                        tentative = (cell, f.time_s, acc)
                    if f.time_s - tentative[1] >= min_dwell_s:
                        new_cell, t0, dist = tentative
                        events.append(ActivityEvent(
                            activity=MOVEMENT_ACTIVITY,
                            event_class=POSITION_BASED,
                            time_s=t0,
                            period=f.period,
                            team=None,
                            players=(label,),
                            roles=(EXECUTING,),
                            position=None,
                            cell=None,
                            attrs={
                                "from_cell": cell_label(confirmed),
                                "to_cell": cell_label(new_cell),
                                "duration_s": t0 - entry_time,
                                "distance_m": dist,
                            },
                        ))
                        confirmed, entry_time = new_cell, t0
                        acc -= dist
                        tentative = None
            last_point = p
            prev_present = True

    events.sort(key=lambda e: (e.period, e.time_s, e.players[0]))
    return events


def merge_streams(
    game_stream: Sequence[ActivityEvent], movement_stream: Sequence[ActivityEvent]
) -> list[ActivityEvent]:
    """Merge the decomposed and movement streams and assign event ids.

    Order: (period, time); ties put game/ball events before position-based
    ones, then sort by first player label, then keep input order.  Ids are
    a zero-padded global sequence, so reruns over identical input produce
    identical ids.
    """
    combined = list(game_stream) + list(movement_stream)

    def sort_key(e: ActivityEvent):
        return (
            e.period,
            e.time_s,
            1 if e.event_class == POSITION_BASED else 0,
            e.players[0] if e.players else "",
        )

    combined.sort(key=sort_key)
    width = max(6, len(str(len(combined))))
    return [
        replace(e, event_id=f"e{i + 1:0{width}d}") for i, e in enumerate(combined)
    ]


def enrich(
    events: Sequence[ActivityEvent], spans: Sequence[PossessionSpan]
) -> list[ActivityEvent]:
    """Attach possession ids, running score and movement-event teams.

    The score attributes count goals strictly before each event, so a
    "Goal" event itself still carries the pre-goal score.  Movement events
    inherit the side their player label is qualified with.
    """
    score = {"Home": 0, "Away": 0}
    out: list[ActivityEvent] = []
    for e in events:
        attrs = dict(e.attrs)
        attrs["score_home"] = score["Home"]
        attrs["score_away"] = score["Away"]
        span = possession_at(e.time_s, e.period, spans)
        if span is not None:
            attrs["possession_id"] = span.span_id
        team = e.team
        if team is None and e.players:
            for side in ("Home", "Away"):
                if e.players[0].startswith(side):
                    team = side
                    break
        out.append(replace(e, team=team, attrs=attrs))
        if e.activity == GOAL_ACTIVITY and e.team in score:
            score[e.team] += 1
    return out
