#!/usr/bin/env python3
"""
ccic workbench - command-line entry point

    python run.py covers --fn NEQ --n 2 --z 1
    python run.py verify --theorem yes --fn NEQ --n 2
    python run.py run --protocol fig1 --fn NEQ --n 3 --x 101 --y 100 --guess auto
    python run.py sweep --n 1
    python run.py serve
"""

import sys

from ccic.cli import main

if __name__ == '__main__':
    sys.exit(main())
