"""Global sections of twists of K, K* and E, by exact linear algebra.

Each h0 is a kernel or cokernel dimension of a multiplication map between
graded pieces of the coordinate ring of X.  Since c1(E) = 0 and E has rank 2,
stability of E is the single vanishing h0(E) = 0.
"""
from monadws.hypersurface import HypersurfaceSpec
from monadws.monad import build_instanton_monad
from monadws.sections import h0_cohomology, h0_dual_kernel, h0_kernel, stability_E

for d in (4, 5, 6):
    spec = HypersurfaceSpec.fermat(d)
    print(f"Fermat hypersurface of degree {d}")
    for c in (1, 2, 3):
        m = build_instanton_monad(c, spec)
        ks = [h0_kernel(m, t).dimension for t in range(-1, 3)]
        kd = [h0_dual_kernel(m, t).dimension for t in range(-1, 3)]
        es = [h0_cohomology(m, t).dimension for t in range(-1, 3)]
        v = stability_E(m)
        print(f"  c={c}: h0(K(t)) {ks}  h0(K*(t)) {kd}  h0(E(t)) {es}  -> E {v.verdict}")
    print()
