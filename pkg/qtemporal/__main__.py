import sys

from qtemporal.cli.main import main

sys.exit(main())
