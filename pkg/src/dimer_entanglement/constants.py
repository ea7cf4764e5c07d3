"""Physical constants in Gaussian (cgs-emu) units.

CODATA 2018 values. Susceptibilities are in cm^3/mol, temperatures in
kelvin, fields in gauss and exchange constants are quoted as J/k_B in kelvin.
"""

#: Avogadro constant, 1/mol (exact).
N_A = 6.02214076e23
#: Boltzmann constant, erg/K (exact).
K_B = 1.380649e-16
#: Bohr magneton, erg/G.
MU_B = 9.2740100783e-21

#: Bohr magneton over Boltzmann constant, K/G.
MU_B_OVER_K_B = MU_B / K_B

#: N_A * mu_B**2 / k_B in cm^3 K / mol (about 0.375148).
C1 = N_A * MU_B**2 / K_B
