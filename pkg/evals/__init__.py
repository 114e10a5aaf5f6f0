"""
Tracked studies of the perceptron codec.

Usage:
    python -m evals.run_mlflow --experiment gamma_tuning --run v1
"""
