"""Tests for guesswork-budget."""
