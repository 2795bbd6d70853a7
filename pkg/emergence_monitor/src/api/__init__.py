"""
API package for the Emergence Monitor.
"""
