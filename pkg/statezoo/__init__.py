"""State zoo package for seeded test-state generators"""
