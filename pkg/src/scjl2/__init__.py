"""Executable model of the SCJ Level 2 mission framework.

Subpackages:

* :mod:`scjl2.calc`     -- process-calculus terms and small-step semantics
* :mod:`scjl2.dsl`      -- ``.cmodel`` / ``.topo`` parsing and pretty printing
* :mod:`scjl2.scjmodel` -- topology -> process network, current and proposed protocols
* :mod:`scjl2.explore`  -- explicit-state exploration and ordering checks
* :mod:`scjl2.hsched`   -- discrete-time hierarchical scheduling simulator
* :mod:`scjl2.api`      -- FastAPI service;  :mod:`scjl2.cli` -- command line
"""

__version__ = "0.1.0"
