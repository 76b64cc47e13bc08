"""
API routes package
"""
