"""Reliability, maintenance cost and redundancy allocation for self-maintaining robot teams."""
