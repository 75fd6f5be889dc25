import sys

from subgraph_detect.cli_run_and_export import main

sys.exit(main())
