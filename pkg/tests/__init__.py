"""Hybridtele tests."""
