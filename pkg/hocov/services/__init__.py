"""
Numerical services: special functions, kernels, covariance models, variograms,
fitting and simulation.
"""
