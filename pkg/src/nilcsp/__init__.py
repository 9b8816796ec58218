"""Exact computations with nilpotent groups, Johnson filtrations and congruence certificates."""
