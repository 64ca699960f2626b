"""Kernel package for product kernel vectors and projector subtraction"""
