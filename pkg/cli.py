"""
Command-line entry point for xentrack; same as the `xentrack` console script.

    uv run python cli.py track --detections dets.jsonl --out tracks.json
"""

import sys

from xentrack.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
