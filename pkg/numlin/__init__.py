"""Numerical linear algebra package: ranks, spectra, joint diagonalization, pencils"""
