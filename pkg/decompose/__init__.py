"""Decompose package for product decompositions and separability certificates"""
