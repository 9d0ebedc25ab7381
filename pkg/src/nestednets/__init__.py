"""Interaction nets with integer attributes, conditional rules and nested patterns."""
