"""
Settings for coregular.
Reads from .env (repo root) or environment variables; CLI flags override.
"""
import os

# Repo root = directory containing this package.
_PACKAGE_DIR = os.path.dirname(os.path.abspath(__file__))
_REPO_ROOT = os.path.dirname(_PACKAGE_DIR)

DEFAULT_ELEMENT_CAP = 1_000_000
DEFAULT_DEGREE_CAP = 12
DEFAULT_WORKERS = 1
OUTPUT_FORMATS = ("text", "json")


def _load_env():
    """Load .env from repo root so it works from any cwd."""
    try:
        from dotenv import load_dotenv
        env_path = os.path.join(_REPO_ROOT, ".env")
        load_dotenv(env_path)
        load_dotenv()  # also cwd, so export FOO= still wins
    except ImportError:
        pass


_load_env()


def _positive_int(name, default):
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw.strip())
    except ValueError:
        return default
    return value if value > 0 else default


def get_element_cap():
    """COREGULAR_ELEMENT_CAP: largest group closure allowed (default 1,000,000)."""
    return _positive_int("COREGULAR_ELEMENT_CAP", DEFAULT_ELEMENT_CAP)


def get_degree_cap():
    """COREGULAR_DEGREE_CAP: clamp for the default degree bound (default 12)."""
    return _positive_int("COREGULAR_DEGREE_CAP", DEFAULT_DEGREE_CAP)


def get_workers():
    """COREGULAR_WORKERS: process workers for batch analysis (default 1)."""
    return _positive_int("COREGULAR_WORKERS", DEFAULT_WORKERS)


def get_default_output():
    """COREGULAR_OUTPUT: "text" or "json". Anything else reads as "text"."""
    value = (os.getenv("COREGULAR_OUTPUT") or "").strip().lower()
    return value if value in OUTPUT_FORMATS else "text"


def fixtures_dir():
    return os.path.join(_REPO_ROOT, "fixtures")
