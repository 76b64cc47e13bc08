"""
GP Dynamical Mixture Models for single-example motion classification and generation
"""
__version__ = "1.0.0"
