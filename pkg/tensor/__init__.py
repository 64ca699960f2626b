"""Tensor package for tripartite index conventions and local operations"""
