"""
Ancilla CZ MCP Application

This module initializes the FastMCP application instance that exposes the
simulator to AI assistants.
"""

import logging
from collections.abc import AsyncIterator
from contextlib import asynccontextmanager

from fastmcp import FastMCP

from .config import Config

logger = logging.getLogger(__name__)


@asynccontextmanager
async def server_lifespan(
    server: FastMCP,  # pylint: disable=unused-argument
) -> AsyncIterator[None]:
    """Validate numeric settings before serving tools."""
    logger.info("Initializing %s...", Config.SERVER_NAME)
    problems = Config.validate()
    if problems:
        raise ValueError("Invalid configuration: " + "; ".join(problems))
    try:
        yield
    finally:
        logger.info("%s stopped", Config.SERVER_NAME)


def create_app() -> FastMCP:
    """Create and configure the FastMCP application."""
    return FastMCP(Config.SERVER_NAME, lifespan=server_lifespan)


mcp = create_app()
