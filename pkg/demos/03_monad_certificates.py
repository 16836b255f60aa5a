"""Build a (2, 6, 2) monad on the Fermat quintic and certify it.

The maps are banded matrices in four linear forms.  Both composites are
checked exactly modulo f, and the rank conditions are certified by minors that
are pure powers of the sections, which can only vanish together at the point
[1:0:0:0:0], where f equals 1.
"""
from monadws.hypersurface import HypersurfaceSpec
from monadws.monad import build_instanton_monad, check_complex, check_ranks

spec = HypersurfaceSpec.fermat(5)
m = build_instanton_monad(2, spec)

print("beta:")
for row in m.beta:
    print("  ", [str(e) for e in row])
print("alpha:")
for row in m.alpha:
    print("  ", [str(e) for e in row])

cc = check_complex(m)
print("\nbeta * alpha mod f:", cc.product, "ok:", cc.ok)
rc = check_ranks(m)
for mi in rc.minors:
    print(f"  {mi['map']:<5} {mi['minor']:<24} det = {mi['det']}")
print("residual point:", rc.locus["point"], "f there:", rc.locus["f_value"], "ok:", rc.ok)

print("\nNow replace the first entry of beta with x2:")
x2 = m.beta[0][1]
bad = check_complex(m.with_entry("beta", 0, 0, x2))
print("ok:", bad.ok, "first nonzero entry:", bad.falsifying)
