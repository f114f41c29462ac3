"""Virus inoculation game on social networks."""
