"""Desk-scale laboratory for randomness over commutative and
noncommutative alphabets."""

__version__ = "0.1.0"

from ._accel import backend, set_backend  # noqa: F401
