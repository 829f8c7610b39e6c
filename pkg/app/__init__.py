"""
optoretro: homodyne record simulator and matched-filter retrodiction toolkit
"""

__version__ = "1.0.0"
__author__ = "optoretro developers"
