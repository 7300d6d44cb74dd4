"""Point counts, Thas invariants and extremal hypersurfaces over small finite fields."""

__version__ = "0.1.0"
