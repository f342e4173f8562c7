import sys

from aqmsim.cli import main

sys.exit(main())
