"""ClockCTT: terms, programs, evaluation, a semantic oracle, a rule checker and a forcing lab."""

__version__ = "0.1.0"
