"""Entry point: python -m src.cli <subcommand> ..."""
import sys

from src.cli.commands import main

if __name__ == "__main__":
    sys.exit(main())
