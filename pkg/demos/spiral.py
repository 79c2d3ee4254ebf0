"""Admissibility on the two passes of a spiral.

The spiral e^{omega(t)} (cos t, sin t), t in [0, 4 pi), runs twice around
the unit circle while omega = 0.  A bump in omega near t = 3 pi pushes the
second pass outward, and at the edges of the bump the two passes touch
tangentially.  Their lifts meet there without being related, and two curves
in the 3-dimensional space R^2 x S^1 cannot meet transversally, so the overlap
is inadmissible.  Without the bump the passes coincide and are related.
"""

import numpy as np

from nullfront import catalog, completion, frontgen, geometry


def passes(bump):
    gen = geometry.build_curve(catalog.spiral(bump), 2048)
    front = frontgen.normal_form(gen, 1, (0.0, 4 * np.pi), 4)
    tube = lambda s: s + np.array([-0.1, 0.0, 0.1])
    inner = completion.patch_from_front(front, (np.pi - 1, np.pi + 1), tube)
    outer = completion.patch_from_front(front, (3 * np.pi - 1, 3 * np.pi + 1), tube)
    return inner, outer


for bump in (True, False):
    rep = completion.admissibility_check(*passes(bump))
    print(f"bump={bump}: {rep.verdict}; related pairs {rep.related_pairs}, "
          f"contact pairs {len(rep.witnesses)}, min lift distance {rep.min_witness_distance:.2e}")

# the whole tube glued from small windows is not a 1-manifold: the two passes
# merge outside the bump and separate inside it
gen = geometry.build_curve(catalog.spiral(True), 1024)
front = frontgen.normal_form(gen, 1, (0.0, 4 * np.pi), 4)
windows = [(0, 3), (2.5, 5.5), (5, 8), (7.5, 10.5), (10, 4 * np.pi + 0.5)]
patches = [completion.patch_from_front(front, w, lambda s: s + np.array([-0.1, 0.0, 0.1]))
           for w in windows]
atlas = completion.glue(patches, strict=False, period=4 * np.pi)
print("tube: 1-manifold:", atlas.manifold, " branch classes:", len(atlas.branch_classes))
