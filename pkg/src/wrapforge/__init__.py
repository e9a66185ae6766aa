"""wrapforge: batch transpiler from argparse scripts to Galaxy tool wrappers."""

__version__ = '0.1.0'
