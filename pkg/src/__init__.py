"""
topo-sft - topology-aware shape-from-template

Reconstructs torn and disconnected deformable surfaces from a flat template
and one perspective image, refining a classical isometric reconstruction
with a learned displacement of its depth samples.
"""

__version__ = "0.1.0"
__author__ = "topo-sft developers"
__license__ = "MIT"
