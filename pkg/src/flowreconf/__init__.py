"""Nowhere-zero flow reconfiguration toolkit."""
