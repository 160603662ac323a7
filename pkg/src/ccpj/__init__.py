"""Quasi-static mechanics of tendon-driven chains of conical beads."""
