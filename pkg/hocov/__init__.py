"""
hocov: spatial covariance families generated by higher-order kernels.

Special functions, kernel and covariance evaluators, empirical variograms,
weighted-least-squares fitting, Gaussian random-field simulation and
envelope tests, with a command-line front end.
"""

__version__ = "0.1.0"
