"""Exact defining equations of excellent SL(2,C)-character varieties of
arborescent knots, with a Monte-Carlo matrix oracle for every formula."""

__version__ = "0.1.0"
