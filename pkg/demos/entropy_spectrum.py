"""The multifractal entropy spectrum of a Gibbs measure.

T(q) is the scaled-pressure function; its exact slope gives the level
alpha(q) of local entropy, and T(q) + q*alpha(q) is the entropy carried
by that level set.  The spectrum is the Legendre transform of T, checked
here in both directions on the grid.
"""

import math

import numpy as np

from ergopress import (
    Potential,
    equilibrium_markov,
    legendre_check,
    make_full_shift,
    t_curve,
)


def main():
    full2 = make_full_shift(2)
    phi = Potential.depth_one(full2, [0.0, math.log(2)])
    grid = np.round(np.arange(-5.0, 5.0001, 0.05), 10)
    curve = t_curve(full2, phi, grid)

    print("Scaled pressure and spectrum on the full 2-shift, phi=(0, log 2):")
    print(f"  T(0) = {curve.t_at(0.0):.9f}   (topological entropy log 2)")
    print(f"  T(1) = {curve.t_at(1.0):.2e}   (vanishes at q = 1)")
    mu = equilibrium_markov(full2, phi)
    i1 = curve.index_of(1.0)
    print(f"  spectrum at q=1: {curve.spectrum_values[i1]:.9f} "
          f"= measure entropy {mu.entropy:.9f}")
    imax = int(curve.spectrum_values.argmax())
    print(f"  spectrum max {curve.spectrum_values[imax]:.9f} near q = "
          f"{curve.q_grid[imax]:+.2f} (the topological entropy)")
    print(f"  alpha range: [{curve.alpha_values.min():.6f}, "
          f"{curve.alpha_values.max():.6f}]")

    chk = legendre_check(curve)
    print(f"  Legendre defects: forward {chk.forward_defect:.2e}, "
          f"reverse {chk.reverse_defect:.2e}")

    print("\n  q       T(q)      alpha(q)   spectrum")
    for q in (-5.0, -2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 5.0):
        i = curve.index_of(q)
        print(f"  {q:+5.2f}  {curve.t_values[i]:+9.5f}  "
              f"{curve.alpha_values[i]:9.5f}  {curve.spectrum_values[i]:9.5f}")

    print("\nA constant potential degenerates the spectrum to one point and")
    print("the duality check is skipped:")
    const_curve = t_curve(full2, Potential.constant(full2, 0.4), grid)
    print(f"  alpha range {const_curve.alpha_range:.2e}; "
          f"skipped = {legendre_check(const_curve).skipped}")


if __name__ == "__main__":
    main()
