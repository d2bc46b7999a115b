"""Compliance assistant: a router dispatching queries between a retrieval-backed
fast path and a multi-step tool-using agent, plus the evaluation harness."""

__version__ = "0.1.0"
