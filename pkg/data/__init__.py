"""Data package for state and certificate files"""
