"""PPT package for partial-transpose verdicts and local support analysis"""
