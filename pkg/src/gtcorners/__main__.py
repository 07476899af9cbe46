import sys

from gtcorners.cli import main

sys.exit(main())
