"""Command-line interface, run configuration and report rendering."""
