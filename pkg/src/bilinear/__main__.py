import sys

from bilinear.cli import main

sys.exit(main())
