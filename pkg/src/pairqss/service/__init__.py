"""HTTP service wrapping the analysis engine."""
