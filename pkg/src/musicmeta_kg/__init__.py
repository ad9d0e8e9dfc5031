"""Music Meta knowledge graph toolkit"""

from .server import mcp

__version__ = "0.1.0"
__all__ = ["main", "mcp"]


def main():
    """Entry point for the MCP server CLI"""
    import os

    from dotenv import load_dotenv

    from .config import configure_logging

    load_dotenv()
    configure_logging()

    transport = os.getenv("MUSICMETA_MCP_TRANSPORT", "stdio")

    if transport == "http":
        host = os.getenv("MUSICMETA_MCP_HOST", "127.0.0.1")
        port = int(os.getenv("MUSICMETA_MCP_PORT", "8000"))
        mcp.run(transport="http", host=host, port=port)
    else:
        mcp.run(transport="stdio")


if __name__ == "__main__":
    main()
