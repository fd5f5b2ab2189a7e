#!/usr/bin/env python3
"""
Markov Bounds CLI

Bernstein-type tail bounds for stationary Markov chains, checked against
exact and simulated values.

Usage:
    python scripts/markov_bounds.py info fixtures/two_state.chain
    python scripts/markov_bounds.py bound --variant thm11 --n 1000 --eps 0.1 --sigma2 1 --c 1 --lambda 0
    python scripts/markov_bounds.py verify tail fixtures/two_state.chain --n 3 --eps 0.5 --trials 100000 --seed 7
    python scripts/markov_bounds.py compare --lambda-plus 0.5 --sigma2 1 --c 1 --csv reports/proxies.csv
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli.commands import main

if __name__ == "__main__":
    sys.exit(main())
