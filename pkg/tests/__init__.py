"""DOA Test Suite"""
