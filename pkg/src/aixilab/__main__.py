import sys

from aixilab.cli import main

sys.exit(main())
