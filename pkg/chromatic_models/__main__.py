import sys

from chromatic_models.cli import main

sys.exit(main())
