"""Runs the 'hearth' command line with 'python -m hearth'."""
from __future__ import annotations

import sys

from .cli import main

if __name__ == '__main__':
    sys.exit(main())
