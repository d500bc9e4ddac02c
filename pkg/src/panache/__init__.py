"""Exact engine for blended and generalized extensions in a graded-representation model."""
