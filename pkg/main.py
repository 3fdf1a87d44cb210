#!/usr/bin/env python3
"""
Main entry point for the overlap-free word toolkit
"""
import sys

from dotenv import load_dotenv

load_dotenv()

from ovlf.cli import run  # noqa: E402

if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
