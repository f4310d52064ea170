import sys

from covspectra.cli import main

sys.exit(main())
