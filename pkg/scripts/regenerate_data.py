"""
Rewrite the JSON documents shipped in unrestrict/data from the gallery.

Entries are written one per line so diffs stay readable.

Usage:
    python scripts/regenerate_data.py          # rewrite the files
    python scripts/regenerate_data.py --check  # exit 1 if a file is stale
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from unrestrict import gallery
from unrestrict.documents import serialize_tensor

DATA_DIR = Path(__file__).parent.parent / "unrestrict" / "data"


def _documents() -> dict[str, Any]:
    return {
        "order_matters": serialize_tensor(gallery.order_matters().tensor),
        "wedge": serialize_tensor(gallery.wedge_unrestriction()),
    }


def render(document: dict[str, Any]) -> str:
    """Return the document with one tensor entry per line."""
    lines = ["{"]
    items = list(document.items())
    for position, (key, value) in enumerate(items):
        comma = "," if position < len(items) - 1 else ""
        if key == "entries":
            lines.append(f'  "{key}": [')
            rows = [
                f"    {json.dumps(entry, separators=(', ', ': '))}" for entry in value
            ]
            lines.append(",\n".join(rows))
            lines.append(f"  ]{comma}")
        else:
            encoded = json.dumps(value, separators=(", ", ": "))
            lines.append(f'  "{key}": {encoded}{comma}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def main() -> int:
    """Rewrite or check every shipped document."""
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--check", action="store_true", help="only report stale files")
    args = parser.parse_args()

    stale = []
    for name, document in _documents().items():
        path = DATA_DIR / f"{name}.json"
        text = render(document)
        current = path.read_text(encoding="utf-8") if path.exists() else ""
        if json.loads(current or "null") == document:
            print(f"{path.name}: up to date")
            continue
        stale.append(path.name)
        if not args.check:
            path.write_text(text, encoding="utf-8")
            print(f"{path.name}: rewritten")
    if args.check and stale:
        print(f"Stale documents: {', '.join(stale)}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
