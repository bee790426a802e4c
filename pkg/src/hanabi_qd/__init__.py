"""Quality-diversity pool generation and ad-hoc cooperation evaluation
for rule-based Hanabi agents."""

__version__ = "0.1.0"
