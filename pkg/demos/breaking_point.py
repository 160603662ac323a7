"""Load one 40 deg beam to 20 mm and back, then print the force curve.

The curve rises steeply, breaks within the first tenth of a millimetre and
then follows a soft plateau while joints open in two-point contact.
"""
import math

from ccpj.chain import straight_chain
from ccpj.geometry import BeadSpec
from ccpj.metrics import fit_stiffness, hysteresis_energies, loss_factor
from ccpj.solver import bending_protocol, pretension
from ccpj.string_model import OgdenUniaxial

spec = BeadSpec(cone_angle=math.radians(40.0), friction=0.1)
chain, _, tendon = pretension(straight_chain(spec, 10), OgdenUniaxial(), 50.0)
curve = bending_protocol(chain, tendon, depth_max=20e-3)

print("depth_mm  force_N")
for x, f in curve.loading[:: max(1, len(curve.loading) // 25)]:
    print(f"{x * 1e3:8.3f}  {f:8.3f}")

K = fit_stiffness(curve)
W_D, W_E = hysteresis_energies(curve)
print(f"\nK = {K:.1f} N/m, W_D = {W_D:.3e} J, W_E = {W_E:.3e} J, eta = {loss_factor(W_D, W_E):.3f}")
print("first departures:", {k: m.value for k, m in curve.first_departures().items()})
