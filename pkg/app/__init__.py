"""Perceptron-based lossy compression of binary memoryless sources."""
