import sys
from pathlib import Path

# Let test modules import the shared oracles module regardless of how
# pytest was invoked.
sys.path.insert(0, str(Path(__file__).parent))
