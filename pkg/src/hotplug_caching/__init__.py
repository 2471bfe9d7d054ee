"""Hotplug coded caching: PDAs, t-designs, MDS-coded placement, and bounds."""

__version__ = "0.1.0"
