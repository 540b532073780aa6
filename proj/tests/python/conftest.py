import os
import sys

# The built extension lives in the cmake binary dir; the wrapper package in
# python/. Both are importable without installing.
_here = os.path.dirname(os.path.abspath(__file__))
_repo = os.path.dirname(os.path.dirname(_here))

ext_dir = os.environ.get("FRAMECL_EXT_DIR")
if ext_dir:
    sys.path.insert(0, ext_dir)
sys.path.insert(0, os.path.join(_repo, "python"))


def fixtures_dir():
    return os.environ.get(
        "FRAMECL_FIXTURES_DIR", os.path.join(_repo, "tests", "fixtures")
    )
