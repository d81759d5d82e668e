import os
import sys

# Make both the python package and the freshly built extension importable
# when running against the CMake build tree.
_here = os.path.dirname(os.path.abspath(__file__))
_repo = os.path.dirname(os.path.dirname(_here))
sys.path.insert(0, os.path.join(_repo, "python"))
_ext_dir = os.environ.get("CONTAGION_EXT_DIR")
if _ext_dir:
    sys.path.insert(0, _ext_dir)
