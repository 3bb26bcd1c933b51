#!/usr/bin/env python3
"""
Vibration fault diagnosis toolkit - Main Entry Point
"""
import sys
from cli.commands import run

if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
