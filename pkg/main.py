#!/usr/bin/env python3
"""
miespec

Closed-form bound states of the Mie-type potential V(r) = -A/r + B/r^2 + C in
N dimensions, with a verification suite that checks every formula against
numerical oracles.

Usage:
    python main.py spectrum --A 1 --N 3 --l 0 --nr 0..2
    python main.py verify --format json
"""

import sys
from pathlib import Path

from dotenv import load_dotenv

# add the repo root to python path so we can import the package
sys.path.insert(0, str(Path(__file__).parent))

# run the command line when this file is executed
if __name__ == "__main__":
    # .env may set MIESPEC_LOG_LEVEL
    load_dotenv()
    from src.miespec.cli import main

    sys.exit(main())
