"""Direct and inverse scattering for a third-order self-adjoint operator on the line."""

__version__ = "0.1.0"
