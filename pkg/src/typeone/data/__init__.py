"""Dataset profiles, ingestion, synthetic corpora, figure grids, reports."""

from .grids import render_pair_grid, render_quad_grid
from .loading import Dataset, load_dataset
from .profiles import DatasetProfile, get_profile, known_profiles
from .reports import (
    REPORT_SCHEMA_VERSION,
    read_report,
    report_schema,
    summary_from_dict,
    summary_to_dict,
    write_report,
)
from .synth import make_digit_corpus, write_idx_dataset, write_image_dataset

__all__ = [
    "Dataset",
    "DatasetProfile",
    "get_profile",
    "known_profiles",
    "load_dataset",
    "make_digit_corpus",
    "write_image_dataset",
    "write_idx_dataset",
    "render_quad_grid",
    "render_pair_grid",
    "write_report",
    "read_report",
    "report_schema",
    "summary_to_dict",
    "summary_from_dict",
    "REPORT_SCHEMA_VERSION",
]
