"""Federated-evaluation benchmarking platform.

Subpackages:
    registry  -- pure, persistence-free domain model (entities, state
                 machines, content hashing, audit chaining, aggregation,
                 release policy)
    server    -- the coordination service: HTTP API, auth, durable store
    runtime   -- the container task contract: manifests, hash verification,
                 sandboxed execution backends
    agent     -- data-owner / model-owner / committee command-line client
    refbench  -- synthetic, deterministic reference benchmark
"""

__version__ = "0.1.0"
