"""
Ancilla CZ MCP Main Entry Point
"""

import logging
import sys

from .app import mcp
from .config import Config

# Import modules to register tools
from . import tools

# Configure logging
logging.basicConfig(level=getattr(logging, Config.LOG_LEVEL))
logger = logging.getLogger(__name__)

# The decorators in tools register with the mcp instance
_ = [tools]


def main():
    """Server startup logic"""
    logger.info("Starting %s v%s", Config.SERVER_NAME, Config.SERVER_VERSION)

    problems = Config.validate()
    if problems:
        for problem in problems:
            logger.error("Configuration problem: %s", problem)
        sys.exit(1)

    mcp.run()


if __name__ == "__main__":
    main()
