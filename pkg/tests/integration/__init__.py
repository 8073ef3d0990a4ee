"""Integration Tests - Test full runs, the CLI and the API"""
