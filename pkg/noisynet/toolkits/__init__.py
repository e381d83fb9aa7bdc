"""Model builders for network reliability and circuit diagnosis."""
