"""
DOA API Package
"""
