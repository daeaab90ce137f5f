import sys

from dcqo.cli import main

sys.exit(main())
