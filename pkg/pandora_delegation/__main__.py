import sys

from pandora_delegation.cli import main

sys.exit(main())
