"""Which contact mode each joint takes when it first opens, by cone angle.

Shallow cones slide along the mating face with two contact points; steep
ones tip over a single edge. The switch sits at 45 deg.
"""
import math

from ccpj.chain import straight_chain
from ccpj.contact import initial_mode
from ccpj.geometry import BeadSpec
from ccpj.solver import bending_protocol, pretension
from ccpj.string_model import OgdenUniaxial

for deg in (30.0, 40.0, 50.0, 60.0, 80.0):
    spec = BeadSpec(cone_angle=math.radians(deg), friction=0.1)
    chain, _, tendon = pretension(straight_chain(spec, 4), OgdenUniaxial(), 50.0)
    curve = bending_protocol(chain, tendon, depth_max=5e-3)
    modes = sorted({m.value for m in curve.first_departures().values()})
    print(f"{deg:4.0f} deg  predicted {initial_mode(spec.cone_angle).value:9s}  observed {', '.join(modes) or '-'}")
