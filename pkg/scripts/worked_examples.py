"""Rebuild the t = 7 CRT plans, check the long runs they produce, the
nine-term run, and a few extravagant witnesses."""
from economical.construct import Variant, build_extravagant, build_plan, verify_run, verify_run_u64


def show(reports, N):
    for r in reports:
        fac = " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in r.factorization)
        print(f"  N{r.n - N:+d}  h={r.h:+d}  {r.n} = {fac}")


plan = build_plan(7, 0, 10, Variant.BASELINE)
print(f"baseline: f0={plan.f0} m={plan.m}\n  M={plan.M}\n  N0={plan.N0}")
N = plan.N0 + 9 * plan.M
show(verify_run(plan, N, offsets=list(range(-1, 7))), N)

plan = build_plan(7, 0, 10, Variant.POWER_M0)
print(f"power_m0: m={plan.m}\n  M={plan.M}\n  N0={plan.N0}")
show(verify_run(plan, plan.N0), plan.N0)

print("nine-term run:")
show(verify_run_u64(1034429177995381247, 9), 1034429177995381247)

for k in (1, 2, 3, 4):
    n, f = build_extravagant(k)
    print(f"extravagant k={k}: {n} = {' * '.join(str(p) for p, _ in f)}")
