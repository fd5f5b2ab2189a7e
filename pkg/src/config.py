"""
Configuration module for Markov chain Bernstein bounds
Loads environment variables and provides runtime configuration constants
"""
import logging
import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)

# Project Paths
PROJECT_ROOT = Path(__file__).parent.parent
FIXTURES_PATH = Path(os.getenv("MARKOV_BOUNDS_FIXTURES", PROJECT_ROOT / "fixtures"))

# Monte Carlo Configuration
SIMULATION_CONFIG = {
    "base_seed": int(os.getenv("MARKOV_BOUNDS_SEED", "20240917")),
    "trials": int(os.getenv("MARKOV_BOUNDS_TRIALS", "100000")),
    "n_jobs": int(os.getenv("MARKOV_BOUNDS_N_JOBS", "1")),
    "trial_chunk_size": int(os.getenv("MARKOV_BOUNDS_TRIAL_CHUNK", "2048")),
}

# Output Configuration
OUTPUT_CONFIG = {
    "float_format": os.getenv("MARKOV_BOUNDS_FLOAT_FORMAT", "%.10g"),
}

LOG_LEVEL = os.getenv("MARKOV_BOUNDS_LOG_LEVEL", "WARNING").upper()
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def validate_config() -> bool:
    """
    Validate runtime configuration

    Returns:
        True if configuration is valid, False otherwise
    """
    errors = []

    if SIMULATION_CONFIG["trials"] < 1:
        errors.append("trials must be >= 1")

    if SIMULATION_CONFIG["n_jobs"] == 0:
        errors.append("n_jobs must be non-zero (use -1 for all cores)")

    if SIMULATION_CONFIG["trial_chunk_size"] < 1:
        errors.append("trial_chunk_size must be >= 1")

    if not (0 <= SIMULATION_CONFIG["base_seed"] < 2**64):
        errors.append("base_seed must lie in [0, 2^64)")

    if LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        errors.append(f"Unknown log level: {LOG_LEVEL}")

    if errors:
        for error in errors:
            logger.error(f"Config Error: {error}")
        return False

    return True


if __name__ == "__main__":
    print("=== Markov Bounds Configuration ===\n")
    print(f"Project Root: {PROJECT_ROOT}")
    print(f"Fixtures Path: {FIXTURES_PATH}")
    print(f"Log Level: {LOG_LEVEL}")
    print(f"\nSimulation Config:")
    for key, value in SIMULATION_CONFIG.items():
        print(f"  {key}: {value}")

    print(f"\nConfiguration Valid: {validate_config()}")
