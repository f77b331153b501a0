#!/usr/bin/env python3
"""Run the toolkit from a source checkout without installing it."""

import sys
from pathlib import Path

# Add the project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from app.cli import main  # noqa: E402

if __name__ == "__main__":
    main()
