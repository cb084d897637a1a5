"""Safe velocity control of planar arms through two equivalent formulations:
a sampled-data barrier-function QP and a linear complementarity problem."""

__version__ = "0.1.0"
