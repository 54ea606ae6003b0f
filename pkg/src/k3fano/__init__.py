"""Lines on quasi-polarized K3 surfaces of degree 8 via Fano graphs of lattices."""

__version__ = "0.1.0"
