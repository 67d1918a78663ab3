"""
Runtime configuration for spheregate.

Values come from (highest first) CLI flags, the manifest ``config`` block,
environment variables (optionally loaded from ``.env``) and built-in defaults.
"""

import logging
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

SCHEMA_TAG = "spheregate/1"

PACKAGE_ROOT = Path(__file__).resolve().parent
CONTEXT_DIR = PACKAGE_ROOT.parent / "context"
MANIFEST_DIR = CONTEXT_DIR / "manifests"
DEFAULT_AXIOMS_PATH = CONTEXT_DIR / "axioms.json"

RULE_IDS_SPHERE4 = ("R-RANK", "R-SECT", "R-META", "R-BOREL", "R-CENTRAL", "R-TABLE")
RULE_IDS_SPHERE3 = ("R-RANK3", "R-META3", "R-TABLE3")

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"⚠️ Ignoring non-integer {name}={raw!r}; using {default}")
        return default


DEFAULT_ORDER_CAP = _int_env("SPHEREGATE_ORDER_CAP", 10**6)
DEFAULT_DEGREE_CAP = _int_env("SPHEREGATE_DEGREE_CAP", 8192)
DEFAULT_TWO_GROUP_CAP = _int_env("SPHEREGATE_TWO_GROUP_CAP", 256)
DEFAULT_THREADS = _int_env("SPHEREGATE_THREADS", 1)
EA_SUBGROUP_CAP = _int_env("SPHEREGATE_EA_SUBGROUP_CAP", 4096)
DEFAULT_LOG_LEVEL = os.getenv("SPHEREGATE_LOG_LEVEL", "INFO").upper()


def axioms_path(override: Optional[str] = None) -> Path:
    """Resolve the axiom-table path: explicit override, then SPHEREGATE_AXIOMS, then the bundled file."""
    if override:
        return Path(override)
    env_path = os.getenv("SPHEREGATE_AXIOMS")
    if env_path:
        return Path(env_path)
    return DEFAULT_AXIOMS_PATH


def bundled_manifest(name: str) -> Path:
    """Path of a bundled manifest, accepting names with or without ``.json``."""
    if not name.endswith(".json"):
        name = f"{name}.json"
    return MANIFEST_DIR / name


def configure_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(level=getattr(logging, (level or DEFAULT_LOG_LEVEL), logging.INFO),
                        format=LOG_FORMAT)
