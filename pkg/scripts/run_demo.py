#!/usr/bin/env python3
"""Walk the full protocol once against an in-process service."""

import sys

from honeyauth.cli import main

if __name__ == "__main__":
    sys.exit(main(["demo", *sys.argv[1:]]))
