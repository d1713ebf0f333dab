"""Allow ``python -m unrestrict``."""

import sys

from .cli import main

sys.exit(main())
