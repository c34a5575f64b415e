"""``python -m spanner_forge``."""

import sys

from spanner_forge.cli import main

sys.exit(main())
