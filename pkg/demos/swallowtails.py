"""Swallowtails of the null fronts over an ellipse and a limacon.

The front over a plane curve f is F(t, s) = (t, f(s) + t nu(s)).  It is
singular at t = 1 / kappa(s); the singular point is a cuspidal edge unless
kappa'(s) = 0, where a swallowtail appears.  So the non-cuspidal points are
exactly the vertices of f.
"""

import numpy as np

from nullfront import catalog, frontgen, singular

for name in ("ellipse", "limacon"):
    front = frontgen.normal_form(catalog.generator(name, 512), 1, (-5.0, 5.0), 64)
    locus = singular.classify(singular.singular_locus(front), front)
    audit = singular.four_vertex_audit(front, locus)
    print(f"{name}:")
    print(f"  singular heights t in [{locus.t.min():.4f}, {locus.t.max():.4f}]")
    print(f"  non-cuspidal at s = {np.round(locus.non_cuspidal_params, 6)}")
    print(f"  annotations: {sorted(set(locus.annotations[locus.labels == singular.NON_CUSPIDAL]))}")
    print(f"  cuspidal arcs: {locus.cuspidal_arcs()}")
    print(f"  complete: {singular.completeness_check(front).complete}, embedded: {audit.embedded}")
    print(f"  four-vertex audit: {audit.status}")

# the limacon crosses itself once, so the embedding hypothesis fails and two
# vertices are allowed
print("limacon crossings:", singular.curve_self_intersections(catalog.generator("limacon", 512)))
