"""Weight regions by size while allowing for censoring.

Censored regions are at least as big as what we saw. Kaplan-Meier masses
push their weight onto the larger complete regions, so the weighted sample
isn't biased towards small storms that fit inside a swath.
"""

from rainshape import SizeObservation, kaplan_meier_weights

obs = [
    SizeObservation(250.0, False, "a"),
    SizeObservation(400.0, True, "b"),    # cut by the swath edge
    SizeObservation(400.0, False, "c"),   # tied with b: the death counts first
    SizeObservation(900.0, False, "d"),
    SizeObservation(1500.0, True, "e"),   # largest and censored
]
km = kaplan_meier_weights(obs)
for cid, w in km.as_dict().items():
    print(f"  {cid}: {w:.4f}")
print(f"mass stranded past the largest size before redistribution: {km.residual:.4f}")
print("sum:", sum(km.weights))

# Without censoring every region simply gets 1/n.
print(kaplan_meier_weights([SizeObservation(a, False) for a in (3.0, 1.0, 2.0)]).weights)
