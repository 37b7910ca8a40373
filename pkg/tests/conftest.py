import sys
from pathlib import Path

# Allow cross-module helper imports (e.g. random_dataset from test_interpolate).
sys.path.insert(0, str(Path(__file__).parent))
