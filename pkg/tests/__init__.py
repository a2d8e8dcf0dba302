"""Tests for OpenGov-LieSphere."""
