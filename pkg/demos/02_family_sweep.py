"""How the (c, 2+2c, c) family behaves as c and d grow.

The kernel discriminant 2c/(c+2) - c^2/(c+2)^2 increases towards 2, so its
minimum over the family sits at c = 1.  The threshold is quadratic in d and
passes 2 at d = 7, after which every member of the family is a counterexample.
"""
from monadws.chern import (
    MonadSignature,
    delta_min_over_family,
    dry_check,
    dry_threshold,
    family_delta,
    kernel_invariants,
    s20_members,
)
from monadws.hypersurface import HypersurfaceSpec

print("c :", " ".join(f"{c:>6}" for c in range(1, 9)))
print("D :", " ".join(f"{str(family_delta(c)):>6}" for c in range(1, 9)))
c_star, d_star = delta_min_over_family(50)
print(f"minimum over c <= 50: {d_star} at c = {c_star}")
print()

print("d :", " ".join(f"{d:>5}" for d in range(4, 13)))
print("th:", " ".join(f"{str(dry_threshold(d)):>5}" for d in range(4, 13)))
print()

print("verdict grid (x = violated):")
for c in range(1, 11):
    row = "".join(
        "x" if dry_check(kernel_invariants(MonadSignature.instanton(c)), HypersurfaceSpec(d=d)).verdict == "violated" else "."
        for d in range(4, 13)
    )
    print(f"  c={c:<2} {row}")
print()

print("second Chern numbers realized by the cohomology bundles on the quartic:")
for m in s20_members(4, 5):
    print(f"  c2 = {m.value:>2} from the monad {m.signature.as_tuple()}")
