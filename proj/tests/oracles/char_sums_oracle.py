"""Independent values for the character-sum tests (mpmath, 40 digits)."""
import mpmath as mp

mp.mp.dps = 40


def e(x):
    return mp.expjpi(2 * mp.mpf(x))


def kloost(a, b, q):
    return sum(e(mp.mpf(a * x + b * pow(x, -1, q)) / q) for x in range(1, q))


def chars(q):
    g = next(g for g in range(2, q) if len({pow(g, k, q) for k in range(q - 1)}) == q - 1)
    dl = {pow(g, k, q): k for k in range(q - 1)}
    return g, lambda j, a: e(mp.mpf(j * dl[a % q]) / (q - 1))


def tau(chi, j, q):
    return sum(chi(j, a) * e(mp.mpf(a) / q) for a in range(1, q))


if __name__ == "__main__":
    for q in (3, 5, 7, 11, 13, 101):
        print("primitive root", q, chars(q)[0])
    print("S(1,1;3)", mp.nstr(kloost(1, 1, 3), 20))
    print("S(1,4;7)", mp.nstr(kloost(1, 4, 7), 20))
    print("S(3,5;11)", mp.nstr(kloost(3, 5, 11), 20))
    print("S(1,1;5)+S(1,-1;5)", mp.nstr(kloost(1, 1, 5) + kloost(1, 4, 5), 20))
    g, chi = chars(5)
    print("tau(quadratic mod 5)", mp.nstr(tau(chi, 2, 5), 20))
    g, chi = chars(11)
    print("tau(chi_1 mod 11)", mp.nstr(tau(chi, 1, 11), 20))
    q = 11
    sq = sum(mp.conj(chi(j, 6)) * tau(chi, j, q) ** 2 for j in range(2, q - 1, 2))
    print("gauss square q=11 m=2 n=3", mp.nstr(sq, 20))
    g, chi = chars(7)
    sq = sum(mp.conj(chi(j, 6)) * tau(chi, j, 7) ** 2 for j in range(2, 6, 2))
    print("gauss square q=7 m=1 n=6", mp.nstr(sq, 20))
    print("4e(1/5)+1", mp.nstr(4 * e(mp.mpf(1) / 5) + 1, 20))
    print("6e(4/7)+1", mp.nstr(6 * e(mp.mpf(4) / 7) + 1, 20))
