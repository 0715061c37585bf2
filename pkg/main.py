"""
driftguard command line.

    python main.py detect --input stream.csv --predictor knn --procedure rs --threshold 20
    python main.py validate --trials 500 --horizon 20000
    python main.py bench-delay --change 500 --post gaussian:mean=3,scale=1

Alarm records and reports go to standard output (or --output); logs go to
standard error. DRIFTGUARD_LOG sets the console log level.
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.append(str(Path(__file__).parent))

from src.cli.commands import main

if __name__ == "__main__":
    sys.exit(main())
