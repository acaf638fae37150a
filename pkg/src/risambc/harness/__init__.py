"""Sweep runner, verification suite, chart rendering and CLI plumbing."""
