"""Which-way knowledge vs fringe contrast: the duality tradeoff.

Sweeps the cavity decay-rate ratio through suppression (< 1), neutral
(= 1), and enhancement (> 1), tracking fringe visibility V, path
predictability P, and the sum V^2 + P^2, which stays pinned at 1: the
information the cavity makes available about the path is paid for, one
for one, in interference contrast.

Run:  python3 demos/02_duality_sweep.py
Writes demos/output/duality.png
"""

import math
import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from unstable_mzi import (
    PathSegment,
    TwoPathLayout,
    UnstableParticle,
    duality_audit,
)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

particle = UnstableParticle(k=2.0 * math.pi, ell=50.0)


def layout_for(gamma_ratio: float) -> TwoPathLayout:
    return TwoPathLayout(
        upper=(PathSegment(10.0),
               PathSegment(60.0, gamma_ratio=gamma_ratio, cavity=True),
               PathSegment(10.0)),
        lower=(PathSegment(80.0),),
    )


ratios = np.linspace(0.0, 4.0, 161)
visibility, predictability, duality_sum = [], [], []
for g in ratios:
    audit = duality_audit(layout_for(float(g)), particle)
    visibility.append(audit.visibility)
    predictability.append(audit.predictability)
    duality_sum.append(audit.duality_sum)

worst = max(abs(s - 1.0) for s in duality_sum)
print(f"{len(ratios)} cavity settings, worst |V^2 + P^2 - 1| = {worst:.3e}")

neutral = duality_audit(layout_for(1.0), particle)
print(f"neutral cavity:     V = {neutral.visibility:.6f}, "
      f"P = {neutral.predictability:.6f}")
suppressed = duality_audit(layout_for(0.0), particle)
print(f"full suppression:   V = {suppressed.visibility:.6f}, "
      f"P = {suppressed.predictability:.6f}  "
      f"(theta = {suppressed.theta_cav:+.3f})")
enhanced = duality_audit(layout_for(4.0), particle)
print(f"strong enhancement: V = {enhanced.visibility:.6f}, "
      f"P = {enhanced.predictability:.6f}  "
      f"(theta = {enhanced.theta_cav:+.3f})")

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(ratios, visibility, label="visibility V")
ax.plot(ratios, predictability, label="predictability P")
ax.plot(ratios, duality_sum, "k:", label="V$^2$ + P$^2$")
ax.axvline(1.0, color="gray", lw=0.5)
ax.set_xlabel("cavity decay-rate ratio")
ax.set_ylabel("value")
ax.set_title("A-priori which-way information vs interference contrast")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "duality.png", dpi=120)
print(f"wrote {OUT / 'duality.png'}")
