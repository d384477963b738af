from stochquant.cli import main
import sys

sys.exit(main())
