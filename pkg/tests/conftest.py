"""Shared fixtures: the mobile-statechart sample workspace."""

from __future__ import annotations

from pathlib import Path

import pytest

from tagweaver import (
    derive_profile,
    parse_manifest,
    parse_statechart,
    parse_tag_model,
    parse_tag_schema,
)

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


@pytest.fixture(scope="session")
def samples_dir() -> Path:
    return SAMPLES


@pytest.fixture(scope="session")
def manifest_text() -> str:
    return (SAMPLES / "statechart.glang").read_text()


@pytest.fixture(scope="session")
def manifest(manifest_text):
    return parse_manifest(manifest_text, filename="statechart.glang")


@pytest.fixture(scope="session")
def profile(manifest):
    return derive_profile(manifest)


@pytest.fixture(scope="session")
def chart_text() -> str:
    return (SAMPLES / "mobile.sc").read_text()


@pytest.fixture(scope="session")
def chart(chart_text):
    return parse_statechart(chart_text, filename="mobile.sc")


@pytest.fixture(scope="session")
def schema_text() -> str:
    return (SAMPLES / "logging_schema.tagschema").read_text()


@pytest.fixture(scope="session")
def schema(schema_text, profile):
    return parse_tag_schema(schema_text, profile, filename="logging_schema.tagschema")


@pytest.fixture(scope="session")
def golden_tags_text() -> str:
    return (SAMPLES / "mobile_tags.tag").read_text()


@pytest.fixture(scope="session")
def golden_tags(golden_tags_text, profile):
    return parse_tag_model(golden_tags_text, profile, filename="mobile_tags.tag")


@pytest.fixture(scope="session")
def full_tags_text() -> str:
    return (SAMPLES / "mobile_tags_full.tag").read_text()


@pytest.fixture(scope="session")
def full_tags(full_tags_text, profile):
    return parse_tag_model(full_tags_text, profile, filename="mobile_tags_full.tag")
