import sys

from gpdmm.cli import main

sys.exit(main())
