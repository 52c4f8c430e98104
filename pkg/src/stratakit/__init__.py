"""stratakit: exact computations with recollements and stratifications
of module categories of finite-dimensional algebras."""

__version__ = "0.1.0"
