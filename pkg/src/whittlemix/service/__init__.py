"""HTTP service wrapping the estimation, prediction, and study layers."""
