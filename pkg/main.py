#!/usr/bin/env python3
"""
Hypercomplex almost abelian Lie algebra toolkit
Command line entry point
"""

from src.cli.app import app
from src.utils.logger import setup_logger


def main():
    """Main application entry point"""
    # Default sinks; --log-level reconfigures them per invocation
    setup_logger()

    app(prog_name="haal")


if __name__ == "__main__":
    main()
