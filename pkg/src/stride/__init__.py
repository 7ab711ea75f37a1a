"""
Stride - variable-frequency legged locomotion MPC toolkit.

Sequential convex centroidal MPC with a learned step-duration predictor,
the whole-body and explicit kino-dynamic baselines, and a planar biped
simulator to run them in closed loop.
"""


VERSION = '0.1.0'
