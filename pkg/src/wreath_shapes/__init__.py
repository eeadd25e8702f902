"""Wreath products of cyclic groups: JM moments, characters and Res-Ind dynamics."""

__version__ = "0.1.0"
