import os
import sys

# make the independent oracles importable as a plain module
sys.path.insert(0, os.path.dirname(__file__))
