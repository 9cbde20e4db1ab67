# Frozen values for tests/unit/test_l_functions.cpp. Requires mpmath.
# Characters: chi_j(g^k) = e(j k / (q-1)), g the least primitive root.
import mpmath as mp

mp.mp.dps = 30


def proot(q):
    for g in range(2, q):
        if len({pow(g, k, q) for k in range(q - 1)}) == q - 1:
            return g


def chi(q, j):
    g = proot(q)
    v = [mp.mpc(0)] * q
    x = 1
    for k in range(q - 1):
        v[x] = mp.expjpi(mp.mpf(2 * j * k) / (q - 1))
        x = x * g % q
    return v


print("// L(s, chi_j mod q)")
for q, j in [(5, 2), (7, 2), (7, 4), (11, 4), (13, 6)]:
    for s in [mp.mpf("0.5"), mp.mpc("0.6", "1"), mp.mpc("0.75", "2")]:
        L = mp.dirichlet(s, chi(q, j))
        print(f"{{{q}, {j}, {mp.nstr(mp.re(s), 3)}, {mp.nstr(mp.im(s), 3)}, "
              f"{mp.nstr(mp.re(L), 18)}, {mp.nstr(mp.im(L), 18)}}},")

print("// zeta(s, a)")
for s, a in [(mp.mpc("0.5", "0"), "0.25"), (mp.mpc("0.5", "14"), "0.7"), (mp.mpc("2", "0"), "1"),
             (mp.mpc("-0.5", "3"), "0.3")]:
    z = mp.zeta(s, mp.mpf(a))
    print(s, a, mp.nstr(mp.re(z), 18), mp.nstr(mp.im(z), 18))

print("// finite part at s = 1 is -digamma(a)")
print(mp.nstr(-mp.digamma(mp.mpf("0.4")), 18), mp.nstr(-mp.digamma(1), 18))
