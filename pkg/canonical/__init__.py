"""Canonical package for rank-N canonical form extraction and assembly"""
