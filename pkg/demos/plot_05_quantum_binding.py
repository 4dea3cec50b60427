"""
Binding in the far-apart limit
==============================

Spread the sites by a factor ell and replace each potential by a tiny
nucleus. At leading order the quantum energies follow the classical ones,
and an electron binds only if it lowers the energy.
"""

from coulomb_sites import V_STAR, binding_report, diamond, lieb_max_binding, scale_system

cfg = diamond()

###############################################################################
# Nuclear charges for ell = 100.
system = scale_system(cfg, V_STAR, 100.0)
print("charges:", system.charges.round(5))

###############################################################################
# Leading-order energies times ell, and the binding verdict.
report = binding_report(cfg, V_STAR, ell=100.0)
for e in report.entries:
    print(f"N = {e.N}:  ell*E = {100 * e.energy: .5f}  binds: {e.binds}")
print("binding electron numbers:", report.binding_numbers)

###############################################################################
# Lieb's bound on the number of electrons that can bind.
for ell in (1.0, 100.0, 1e4):
    print(f"ell = {ell:g}: at most {lieb_max_binding(scale_system(cfg, V_STAR, ell))}")
