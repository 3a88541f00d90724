"""Hull perimeter and volume statistics of large random planar maps."""

__version__ = "0.1.0"
