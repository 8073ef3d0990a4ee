"""Unit Tests - Test pipeline stages in isolation"""
