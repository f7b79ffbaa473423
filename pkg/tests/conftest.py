import sys
from pathlib import Path

# make tests/ importable as plain modules (gens, oracles) regardless of cwd
sys.path.insert(0, str(Path(__file__).parent))
