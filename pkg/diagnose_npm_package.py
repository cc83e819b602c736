"""
Analyze npm packages given by name.

    python diagnose_npm_package.py --packages NAME [NAME ...]
        [--config FILE] [--html FILE] [--output_dir DIR]
"""

import sys

from src.cli import diagnose_npm_packages

if __name__ == "__main__":
    sys.exit(diagnose_npm_packages())
