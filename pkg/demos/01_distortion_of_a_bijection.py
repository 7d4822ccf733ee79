"""
Distortion of a single bijection
=================================

Two small end spaces: one has a triple of ends that split three ways at
height 1, the other splits every triple in two.  We push the spheres of the
first space through an explicit bijection and look at how spread out their
images are.
"""
from dendrorho.distortion import max_distortion_exponent, pair_exponent, inverse
from dendrorho.generators import gen_example41, h_n_map
from dendrorho.ultrametric import level_spectrum, sphere

U, V = gen_example41(3)
print("points of U:", U.points)
print("spectrum at F0:", [str(t) for t in level_spectrum(U, "F0")])
print("sphere of level 1 at F0:", sorted(sphere(U, "F0", 1)))

# The map sends the trifurcating triple to triple n of V, whose two inner
# heights differ by 1/n; nothing else moves relative to anything else.
for n in (1, 2, 3, 4):
    f = h_n_map(3, n)
    fwd = max_distortion_exponent(f, U, V)
    back = max_distortion_exponent(inverse(f), V, U)
    center, level, pair = fwd.witness
    print(f"n={n}: forward {fwd.max_exponent} at ({center}, {level}) via {pair}, "
          f"inverse {back.max_exponent}, pair exponent {pair_exponent(f, U, V)}")
