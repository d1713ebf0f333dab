"""Tests for the unrestrict package."""
