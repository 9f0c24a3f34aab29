"""Tools for machine-readable execution descriptions.

Parse descriptions committed next to code, answer "how do I reproduce this"
queries against them, plan and run the commands they describe, fall back to
filename heuristics when no description exists, and exchange descriptions
with a shared library service.
"""

__version__ = "0.1.0"
