"""
OV Solve - inverse scattering toolkit for the Ostrovsky-Vakhnenko equation
N-loop solitons, long-time asymptotics, direct scattering and a pseudospectral oracle
"""

__version__ = "1.0.0"

# Stamped into every run manifest
FORMAT_VERSION = "1"
