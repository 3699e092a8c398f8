"""
Test suite for topo-sft.
"""