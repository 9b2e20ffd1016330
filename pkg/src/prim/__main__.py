import sys

from prim.cli import main

sys.exit(main())
