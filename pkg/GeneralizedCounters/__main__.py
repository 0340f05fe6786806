import sys

from GeneralizedCounters.cli import main

sys.exit(main())
