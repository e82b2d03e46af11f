"""Unit test package for pimass."""
