#!/usr/bin/env python3
"""
Run socverify from a source checkout without installing it.

Same as the `socverify` console script: loads .env (SOC_VERIFY_LOG_LEVEL,
SOC_VERIFY_THREADS), configures logging and runs one subcommand.

Usage:
    python run.py check --problem P2
    python run.py chatter --problem P1 --eps-list 0.25,0.125
"""

import sys

from socverify.cli.main import console_main

if __name__ == "__main__":
    sys.exit(console_main())
