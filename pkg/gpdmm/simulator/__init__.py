"""
Simulator package for generating synthetic motion datasets
"""
from .generator import SyntheticMotionGenerator, synth_generate

__all__ = ["SyntheticMotionGenerator", "synth_generate"]
