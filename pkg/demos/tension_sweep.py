"""Initial stiffness against string pretension for the default beam."""
import math

from ccpj.chain import straight_chain
from ccpj.geometry import BeadSpec
from ccpj.metrics import fit_stiffness
from ccpj.solver import bending_protocol, pretension
from ccpj.string_model import OgdenUniaxial

spec = BeadSpec(cone_angle=math.radians(40.0), friction=0.1)
print("tension_N  K_Npm")
for T in (10.0, 25.0, 50.0, 80.0, 120.0):
    chain, _, tendon = pretension(straight_chain(spec, 10), OgdenUniaxial(), T)
    # the initial slope only needs the first millimetre
    curve = bending_protocol(chain, tendon, depth_max=2e-3)
    print(f"{T:9.1f}  {fit_stiffness(curve):8.1f}")
