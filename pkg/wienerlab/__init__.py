# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
wienerlab - numerical laboratory for boundary regularity of singular parabolic equations

Computes, on masked Cartesian grids:
- elliptic p-capacities of condensers and capacity-ratio profiles delta(rho)
- Wiener-type integrals, the modulus omega_bar(rho) and boundary point classification
- solutions of the Cauchy-Dirichlet problem for the parabolic p-Laplacian, 1 < p < 2
- desk-scale verification of the boundary oscillation decay and Harnack-type inequalities

Entry point: the ``wienerlab`` command (see ``wienerlab.commands``).
"""

__version__ = "0.3.0"
