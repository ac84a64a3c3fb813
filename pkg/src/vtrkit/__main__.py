import sys

from vtrkit.cli import main

sys.exit(main())
