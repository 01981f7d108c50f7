"""Print the curated worked examples as canonical JSON.

    python3 scripts/paper_demos.py [--out demos.json]
"""

import sys

from adelekit.cli import main

if __name__ == "__main__":
    sys.exit(main(["paper-demos", *sys.argv[1:]]))
