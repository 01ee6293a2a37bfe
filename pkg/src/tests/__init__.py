"""
Pitching Benchmark Test Suite

Test Phases:
    1. Autodiff core and optimizer
    2. Signal preparation
    3. Dataset records, corpus files and the synthetic corpus
    4. Model specifications, networks and checkpoints
    5. Folds, training and the evaluation harness
    6. Statistics, expertise grouping and ablation
    7. Command line, configuration and reports
"""

__version__ = "1.0.0"
