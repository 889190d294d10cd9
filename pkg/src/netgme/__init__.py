"""Graph-theoretic robustness of genuine multipartite entanglement in noisy isotropic networks."""

__version__ = "0.1.0"
