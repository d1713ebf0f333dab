"""Maintenance scripts for the unrestrict package."""
