"""Online dial-a-ride on the real line: simulation, exact offline solving,
adversarial lower bounds and closed-form bound calculators."""

__version__ = "0.1.0"
