import sys

from swkde.cli import main

sys.exit(main())
