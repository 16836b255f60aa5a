"""A mechanized stability proof for the kernel bundle K, and its replay.

The engine proves that every normalized exterior power of K* has no sections,
by chasing long exact sequences down to line bundles on X.  The resulting log
is replayed by an independent checker; dropping any single step breaks it.
"""
import copy

from monadws.chase import replay, run_stability_script
from monadws.hypersurface import HypersurfaceSpec

log = run_stability_script(3, HypersurfaceSpec.fermat(5))
for st in log.steps:
    parents = ", ".join(st.parents)
    print(f"{st.id:>4}  {st.rule:<18} {st.content.text()}" + (f"   [{parents}]" if parents else ""))
print("\nverdict:", log.verdict)
for remark in log.remarks:
    print("remark:", remark)

data = log.to_json()
print("\nreplay:", replay(data).ok)
broken = copy.deepcopy(data)
removed = broken["steps"].pop(17)
rep = replay(broken)
print(f"replay without {removed['id']} ({removed['fact']['text']}):", rep.ok)
print("first complaint:", rep.errors[0])
