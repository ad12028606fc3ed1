"""apiswap: mine git histories for custom-method → library-API replacements."""

__version__ = "0.1.0"
