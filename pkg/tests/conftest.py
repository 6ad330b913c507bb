"""Shared fixtures: one synthetic match, loaded and converted once per session."""

import pytest

from footocel.ingest import load_match
from footocel.pipeline import MatchPaths, RunConfig, convert_matches
from footocel.synth import write_synth_match


@pytest.fixture(scope="session")
def synth_paths(tmp_path_factory) -> MatchPaths:
    directory = tmp_path_factory.mktemp("synthmatch")
    home, away, events = write_synth_match(directory, prefix="synth")
    return MatchPaths(str(home), str(away), str(events), "game1")


@pytest.fixture(scope="session")
def bundle(synth_paths):
    return load_match(
        synth_paths.home_tracking,
        synth_paths.away_tracking,
        synth_paths.events,
        match_id=synth_paths.match_id,
    )


@pytest.fixture(scope="session")
def converted(synth_paths):
    return convert_matches([synth_paths], RunConfig())


@pytest.fixture(scope="session")
def log(converted):
    return converted[0]


@pytest.fixture(scope="session")
def spans(converted):
    return converted[1]["game1"]
