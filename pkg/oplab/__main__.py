import sys

from oplab.cli import main

sys.exit(main())
