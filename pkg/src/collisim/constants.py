"""Physical constants and the unit convention used throughout the package.

Natural units with hbar = 1.  Energies and angular frequencies are quoted
in rad/ns (a coupling of "1 GHz" enters as 1.0 rad/ns), times in ns, and
temperatures in mK.  The single conversion factor needed is k_B/hbar
expressed in rad/(ns*mK).
"""

BOLTZMANN_J_PER_K = 1.380649e-23
HBAR_J_S = 1.054572e-34

# k_B/hbar in rad/(ns*mK): (J/K)/(J*s) * 1e-9 s/ns * 1e-3 K/mK
KB_OVER_HBAR_RAD_PER_NS_MK = BOLTZMANN_J_PER_K / HBAR_J_S * 1e-12

UNIT_CONVENTION = "hbar=1; 1 GHz -> 1 rad/ns; time in ns; temperature in mK"
