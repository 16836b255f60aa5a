"""Three bundles that break the strong Bogomolov inequality.

The (1, 4, 1) monad O(-1) -> O^4 -> O(1) has a rank-2 cohomology bundle E and
a rank-3 kernel bundle K.  Their discriminants are fixed numbers, while the
threshold c2(TX)/12 grows with the degree of the hypersurface.
"""
from monadws.chern import MonadSignature, cohomology_invariants, dry_check, kernel_invariants
from monadws.hypersurface import HypersurfaceSpec

sig = MonadSignature(1, 4, 1)
E, K = cohomology_invariants(sig), kernel_invariants(sig)
print(f"E: rank {E.rank}, c1 {E.c1}, c2 {E.c2}, discriminant {E.delta}")
print(f"K: rank {K.rank}, c1 {K.c1}, c2 {K.c2}, discriminant {K.delta}")
print()

for d, name, inv in ((6, "E", E), (4, "K", K), (5, "K", K)):
    v = dry_check(inv, HypersurfaceSpec(d=d))
    print(f"degree {d}, bundle {name}: {v.delta} vs threshold {v.threshold} -> {v.verdict} (margin {v.margin})")

print()
print("On P^3 (d = 1) the same E is fine:", dry_check(E, HypersurfaceSpec(d=1)).verdict)
