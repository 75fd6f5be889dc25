"""Detection of a planted dense subgraph in a sparse Erdős–Rényi graph."""

__version__ = "1.1.0"
