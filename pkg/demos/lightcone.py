"""The light cone as a null front, and why its generator is a double cover.

F(u, v) = (u^2 + v^2, 2uv, u^2 - v^2) is null: <F, F> = 0 identically.
Sampled on a dyadic lattice every product is exact, so the check is exact
too.  Reconstructing the generator gives g = 0 with normal
(sin 2 theta, cos 2 theta): the normal circle is traversed twice while
theta goes around once, and the lift (g, nu) is not injective.
"""

import numpy as np

from nullfront import catalog, completion

points, normals, theta = catalog.lightcone_samples()
q = -points[:, 0] ** 2 + points[:, 1] ** 2 + points[:, 2] ** 2
print("samples:", len(points), " max |<F,F>|:", np.max(np.abs(q)))

patch = completion.reconstruct_generator(points, normals, theta, closed=True)
print("parameter values:", len(patch))
print("max |g|:", np.max(np.abs(patch.g)))
print("winding number of the normal:", completion.winding_number(patch))
print("lift injective:", patch.strongly_adopted())

# theta and theta + pi carry the same (g, nu)
half = np.isclose(patch.params[:, None], np.mod(patch.params + np.pi, 2 * np.pi)[None, :])
i, j = np.nonzero(half)
print("antipodal parameter pairs with equal lift:",
      int(np.sum(np.all(np.isclose(patch.lift[i], patch.lift[j]), axis=1))), "of", len(i))
