"""Command-line experiment scripts."""
