import sys

from thzcavity.cli import main

sys.exit(main())
