"""Extreme Entropy Machines."""
