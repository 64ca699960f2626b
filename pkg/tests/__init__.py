"""Test __init__ file"""
