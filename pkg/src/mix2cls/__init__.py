"""Mixed sessions to classical sessions: type checking, translation and bounded verification."""

__version__ = "0.1.0"
