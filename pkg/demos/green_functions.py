"""Semiclassical energy Green functions against closed forms.

One free particle: the semiclassical G built from the characteristic action
W = p'R and the trajectory density D = m^2/R^2 reproduces the outgoing
spherical wave exactly. N particles: the hyperspherical asymptotic form
approaches the exact Hankel-function Green function as the hyperradius grows.
"""

import numpy as np

from itkit.classical import characteristic_action_W_free, density_D_free
from itkit.scatter import (
    green_free,
    green_hyper_asymptotic,
    green_hyper_hankel,
    green_semiclassical,
    hyper_config,
)


def main() -> None:
    m, E = 1.0, 0.5
    print("single particle, semiclassical vs exact:")
    for R in (1.0, 10.0, 100.0):
        w = characteristic_action_W_free([R], [0.0], E, m)
        d = density_D_free([R], [0.0], E, m)
        g_sc = green_semiclassical(w, d)
        g_ex = green_free([R, 0.0, 0.0], [0.0, 0.0, 0.0], E, m)
        print(f"  R = {R:7.1f}  |G_sc - G_exact| = {abs(g_sc - g_ex):.3e}")

    print("two particles, hyperspherical asymptotics vs Hankel form:")
    config = hyper_config([1.0, 1.0], 1.0, E)
    for rr in np.logspace(1, 4, 4):
        g_asym = green_hyper_asymptotic(config, rr)
        g_hank = green_hyper_hankel(config, rr)
        rel = abs(abs(g_asym) - abs(g_hank)) / abs(g_hank)
        print(f"  hyperradius = {rr:9.1f}  relative modulus error = {rel:.3e}")


if __name__ == "__main__":
    main()
