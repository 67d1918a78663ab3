"""
spheregate - command-line entry point

Loads .env, configures logging on stderr and hands over to the click CLI.
"""

import logging
import os

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

from spheregate.cli import cli  # noqa: E402
from spheregate.config import configure_logging  # noqa: E402

# Configure logging
configure_logging()
logger = logging.getLogger(__name__)

if __name__ == "__main__":
    axioms = os.getenv("SPHEREGATE_AXIOMS")
    if axioms and not os.path.exists(axioms):
        logger.warning(f"⚠️ SPHEREGATE_AXIOMS points to a missing file: {axioms}")
    cli()
