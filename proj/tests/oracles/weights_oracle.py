"""Independent values of V, W, gamma ratios and G+- by mpmath line integrals (30 digits)."""
import mpmath as mp

mp.mp.dps = 30
T_EVEN = mp.mpf("13.77975135189073894424367")


def V(s, x, c=2):
    s = mp.mpc(s)
    f = lambda t: (mp.sqrt(mp.pi) * x) ** (-(c + 1j * t)) * mp.gamma((s + c + 1j * t) / 2) / mp.gamma(s / 2) \
        * mp.e ** ((c + 1j * t) ** 2) / (c + 1j * t)
    return mp.quad(f, [-mp.inf, -5, 0, 5, mp.inf]) / (2 * mp.pi)


def W(s, x, T, c=2):
    s = mp.mpc(s)
    g = lambda z: mp.gamma((z + 1j * T) / 2) * mp.gamma((z - 1j * T) / 2)
    f = lambda t: (mp.pi * x) ** (-(c + 1j * t)) * g(s + c + 1j * t) / g(s) \
        * mp.e ** ((c + 1j * t) ** 2) / (c + 1j * t)
    return mp.quad(f, [-mp.inf, -5, 0, 5, mp.inf]) / (2 * mp.pi)


def gd(s):
    return mp.pi ** (-s / 2) * mp.gamma(s / 2)


def gm(s, T):
    return mp.pi ** (-s) * mp.gamma((s + 1j * T) / 2) * mp.gamma((s - 1j * T) / 2)


def G(sign, s, T):
    a = mp.gamma((1 + s + 1j * T) / 2) * mp.gamma((1 + s - 1j * T) / 2) / (mp.gamma((-s + 1j * T) / 2) * mp.gamma((-s - 1j * T) / 2))
    b = mp.gamma((2 + s + 1j * T) / 2) * mp.gamma((2 + s - 1j * T) / 2) / (mp.gamma((1 - s + 1j * T) / 2) * mp.gamma((1 - s - 1j * T) / 2))
    return (a + sign * b) / (2 * mp.pi)


if __name__ == "__main__":
    for s, x in [(0.5, 1e-6), (0.5, 1.0), (0.5, 100 * mp.sqrt(3)), (0.7, 1.0), (mp.mpc(0.6, 1), 0.3), (mp.mpc(0.75, 2), 7.0)]:
        print("V", s, x, mp.nstr(V(s, x), 18))
    for s, x, T in [(0.5, 1e-6, 9.5337), (0.5, 1500, 9.5337), (0.9, 2.0, T_EVEN), (mp.mpc(0.5, 0), 0.1, T_EVEN), (mp.mpc(0.75, 2), 3.0, T_EVEN)]:
        print("W", s, x, T, mp.nstr(W(s, x, T), 18))
    s0 = mp.mpc(0.75, 5)
    print("ratio_dirichlet(0.75+5i)", mp.nstr(gd(1 - s0) / gd(s0), 18))
    print("ratio_maass(0.75+5i, 9.5337)", mp.nstr(gm(1 - s0, 9.5337) / gm(s0, 9.5337), 18))
    s0 = mp.mpc(0.6, 1)
    print("ratio_maass(0.6+i, T_even)", mp.nstr(gm(1 - s0, T_EVEN) / gm(s0, T_EVEN), 18))
    for sg in (1, -1):
        print("G", sg, mp.nstr(G(sg, mp.mpc(-0.99, 3), T_EVEN), 18), mp.nstr(G(sg, mp.mpc(0.5, -20), T_EVEN), 18))


def bump_mellin(w):
    psi = lambda x: mp.e ** (-1 / (1 - (2 * x - 3) ** 2))
    return mp.quad(lambda x: psi(x) * x ** (w - 1), [1, 1.5, 2])


if __name__ == "__main__":
    for w in (mp.mpc(1, 0), mp.mpc(0.5, 3), mp.mpc(-0.5, -40)):
        print("bump mellin", w, mp.nstr(bump_mellin(w), 18))
