"""
qtemporal - instrument moment matrices for quantum temporal correlations.

Device-independent and semi-device-independent bounds on temporal Bell
functionals, temporal steering robustness, random access codes and
prepare-and-measure self-testing.
"""

__version__ = "0.3.0"
