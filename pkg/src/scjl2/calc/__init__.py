"""Process-calculus core: terms, stores and labelled small-step semantics."""
from .terms import *  # noqa: F401,F403
from .semantics import Configuration, Engine, alphabet, initial, step, writes  # noqa: F401
