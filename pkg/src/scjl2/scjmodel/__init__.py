"""Topologies and their compilation into current/proposed protocol networks."""
from .topology import (
    BUILTINS, Consumer, Handler, Mission, NestedSequencer, Producer, Request,
    Sequencer, Terminator, Thread, Topology, TopologyError, VariantMismatch,
    WorkLoop, builtin_topology, rewrite_for_proposed, validate,
)
from .generate import STATE_CHANNELS, TERMINATION_CHANNELS, VARIANTS, ModelBundle, build_model, generate_source
