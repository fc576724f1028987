import sys

from bnpolarity.cli import main

sys.exit(main())
