import sys
from syncproc.cli import main
sys.exit(main())
