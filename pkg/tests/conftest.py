"""Shared fixtures: the reference workload loaded once per session."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
DATA_DIR = TESTS_DIR / "data"
if str(TESTS_DIR) not in sys.path:  # make reference_tables / oracles importable
    sys.path.insert(0, str(TESTS_DIR))

from attrscale import build_usage_set, load_catalog, load_workload, run_pipeline  # noqa: E402


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(DATA_DIR / "reference_catalog.txt")


@pytest.fixture(scope="session")
def reference_usage(catalog):
    records = load_workload(DATA_DIR / "reference_workload_attrs.jsonl", "jsonl-attrs")
    return build_usage_set(records, catalog)


@pytest.fixture(scope="session")
def reference_bundle(reference_usage):
    return run_pipeline(reference_usage)
