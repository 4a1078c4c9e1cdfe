import sys

from hypersig.cli import main

sys.exit(main())
