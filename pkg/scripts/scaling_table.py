#!/usr/bin/env python3
# Size limits and fidelity ceilings vs chain length, for the default
# parameter point (all rates in GHz before the 2*pi).
import math

from wstate_forge import SystemParams, scalability_report

TWO_PI = 2 * math.pi

print(f"{'N':>3} {'ceiling':>9} {'uniform':>9} {'single-site':>12}")
for n in range(2, 13):
    params = SystemParams(
        n_sites=n,
        omega_c=6.0 * TWO_PI,
        omega_q=7.0 * TWO_PI,
        g=0.1 * TWO_PI,
        j_hop=0.1 * TWO_PI,
        kappa=1e-4 * TWO_PI,
        gamma=1e-5 * TWO_PI,
        gamma_phi=1e-6 * TWO_PI,
    )
    rep = scalability_report(params)
    print(
        f"{n:>3} {rep.ceiling:>9.4f}"
        f" {'yes' if rep.uniform_resolvable else 'NO':>9}"
        f" {'yes' if rep.single_site_resolvable else 'NO':>12}"
    )

print(f"\nlarge-N ceiling: {rep.ceiling_large_n:.4f}")
print(f"max stabilizable sites at this kappa: {rep.n_max_sites:.0f}")
