"""Text front ends: ``.cmodel`` process models and ``.topo`` topologies."""
from .cmodel import ModelSource, format, format_term, parse
from .lexer import ArityError, DomainDeclError, DslError, LexError, ParseError, ResolveError

__all__ = ["ModelSource", "parse", "format", "format_term", "DslError", "LexError", "ParseError",
           "ResolveError", "ArityError", "DomainDeclError"]
