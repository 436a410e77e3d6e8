import sys

from rsl.cli import main

sys.exit(main())
