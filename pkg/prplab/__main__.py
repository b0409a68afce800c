"""Allow ``python -m prplab``."""

from .cli import main

raise SystemExit(main())
