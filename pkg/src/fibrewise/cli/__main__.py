import sys

from fibrewise.cli import main

sys.exit(main())
