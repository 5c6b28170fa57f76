"""Flows of 2D velocity fields with a moving point singularity.

Library layout:

- ``kernels``     Biot-Savart kernel, its algebraic regularization, singular drifts.
- ``fields``      Vortex paths, smooth time-varying fields, mollification, composites.
- ``flow``        Trajectory-ensemble integration with near-singularity substepping.
- ``vortexwave``  Coupled blob-vorticity + point-vortex dynamics.
- ``diagnostics`` delta/g/flow-error functionals, near-collision measures,
                  compressibility checks, convergence-rate harness.
- ``scenario``    Text scenario files and the small expression grammar.
- ``cli``         Scenario-driven command line front end.
"""

__version__ = "0.1.0"
