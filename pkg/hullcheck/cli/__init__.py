"""Command-line layer: ingestion, dispatch, reports, bench and diagnostics."""
