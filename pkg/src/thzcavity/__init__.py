"""Eigenmodes, Josephson relations and radiometry for elliptical THz emitters."""

__version__ = "0.1.0"
