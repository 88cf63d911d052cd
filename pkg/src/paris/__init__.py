"""Personalized activity recommendations for better sleep.

Behavior-mode clustering over daily actigraphy, good-sleep activity recipes
per mode, and a constraint-aware continuous recommendation engine, plus a
deterministic synthetic-cohort generator for end-to-end verification.
"""

__version__ = "0.1.0"
