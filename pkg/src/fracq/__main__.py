import sys

from fracq.cli import main

sys.exit(main())
