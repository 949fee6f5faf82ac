"""
Tests package for blockdelta

This package contains all unit tests for the blockdelta package.
"""
