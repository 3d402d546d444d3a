#!/usr/bin/env python3
"""
brownsim
Simulator and verification suite for the five-qubit Brown state

Main entry point for the command line
"""

import sys
from pathlib import Path

# Add src directory to Python path
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

try:
    import numpy  # noqa: F401
    import scipy  # noqa: F401
    from src.utils.logger import init_logging
    from src.cli.app import main as cli_main
except ImportError as e:
    print("Error: Required dependencies not installed.", file=sys.stderr)
    print("Please run: pip install -r requirements.txt", file=sys.stderr)
    print(f"Missing: {e}", file=sys.stderr)
    sys.exit(1)


def check_python_version():
    """Ensure Python version is compatible"""
    if sys.version_info < (3, 8):
        print("Error: Python 3.8 or higher is required", file=sys.stderr)
        print(f"Current version: {sys.version}", file=sys.stderr)
        sys.exit(1)


def main():
    """Main application entry point; stdout is reserved for command output"""
    check_python_version()

    try:
        logger = init_logging()
        code = cli_main(sys.argv[1:])
        logger.end_session()
    except Exception as e:
        print(f"Fatal error: {e}", file=sys.stderr)
        if 'logger' in locals():
            logger.error("Fatal application error", e)
        sys.exit(1)
    sys.exit(code)


if __name__ == "__main__":
    main()
