"""
Update the version in pyproject.toml and unrestrict/__init__.py.

Usage:
    python scripts/update_version.py 0.2.0
"""

import argparse
import re
import sys
from pathlib import Path

ROOT = Path(__file__).parent.parent
VERSION_PATTERN = re.compile(r"^\d+\.\d+\.\d+$")
TARGETS = (
    (ROOT / "pyproject.toml", r'^version = "[^"]*"', 'version = "{}"'),
    (
        ROOT / "unrestrict" / "__init__.py",
        r'^__version__ = "[^"]*"',
        '__version__ = "{}"',
    ),
)


def _replace(path: Path, pattern: str, replacement: str) -> bool:
    text = path.read_text(encoding="utf-8")
    updated, count = re.subn(pattern, replacement, text, count=1, flags=re.MULTILINE)
    if count != 1:
        print(f"No version line found in {path}")
        return False
    path.write_text(updated, encoding="utf-8")
    return True


def main() -> int:
    """Update the version in the project metadata and the package."""
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("version", help="new version, X.Y.Z")
    args = parser.parse_args()

    if not VERSION_PATTERN.match(args.version):
        print(f"Version {args.version!r} is not of the form X.Y.Z")
        return 1
    for path, pattern, template in TARGETS:
        if not _replace(path, pattern, template.format(args.version)):
            return 1
        print(f"{path.name}: {args.version}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
