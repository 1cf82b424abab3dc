import sys
from pathlib import Path

SRC = Path(__file__).resolve().parent.parent / "src"

try:
    import regforge  # noqa: F401
except ImportError:
    sys.path.insert(0, str(SRC))
