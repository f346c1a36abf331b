"""Entry point for the hullcheck command-line application."""

from __future__ import annotations

import sys

from hullcheck.cli.app import main

if __name__ == "__main__":
    sys.exit(main())
