import sys

from plegmalab.cli.main import main

sys.exit(main())
