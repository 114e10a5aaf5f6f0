"""Study configuration and curve checks."""
