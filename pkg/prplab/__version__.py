"""Version information for prplab."""

__version__ = "0.1.0"
__author__ = "prplab developers"
__description__ = "Exact-rational laboratory for representation properties on finite filtered spaces"
