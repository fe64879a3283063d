"""2D topological stabilizer codes, MBP/AMBP quaternary decoding, and
Monte-Carlo threshold estimation."""

__version__ = "0.1.0"
