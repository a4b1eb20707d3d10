"""First-order elastic scattering from a repulsive Gaussian bump.

The forward amplitude for V(r) = V0 exp(-r^2/a^2) has the closed form
f(0) = -(m / 2 pi) V0 pi^(3/2) a^3, which checks the quadrature, and the
differential cross section |f(theta)|^2 falls off with momentum transfer.
"""

import math

import numpy as np

from itkit.scatter import born_amplitude, cross_section


def main() -> None:
    v0, a, m = 0.01, 1.0, 1.0
    energy = 0.5
    p = math.sqrt(2.0 * m * energy)

    def potential(x, y, z):
        return v0 * np.exp(-(x * x + y * y + z * z) / (a * a))

    f0 = born_amplitude(potential, [p, 0.0, 0.0], [p, 0.0, 0.0], m)
    analytic = -(m / (2.0 * math.pi)) * v0 * math.pi ** 1.5 * a ** 3
    print(f"forward amplitude  quadrature {f0.real:.12e}")
    print(f"                   closed form {analytic:.12e}")
    print(f"                   relative gap {abs(f0.real - analytic) / abs(analytic):.2e}")

    print("theta (deg)   dsigma/dOmega (au)")
    for deg in (0, 30, 60, 90, 120, 150, 180):
        th = math.radians(deg)
        p_out = [p * math.cos(th), p * math.sin(th), 0.0]
        f = born_amplitude(potential, [p, 0.0, 0.0], p_out, m)
        print(f"{deg:11d}   {cross_section(f):.6e}")


if __name__ == "__main__":
    main()
