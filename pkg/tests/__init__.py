"""Tests package for REST API."""
