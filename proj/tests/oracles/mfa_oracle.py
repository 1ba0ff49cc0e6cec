"""Independent mean-field oracle.

Writes the map as pairwise fluxes: operator s gains from a at rate
k * c_s^4 * c_a (a unanimous s-panel meeting an a-customer) and loses at rate
k * c_a^4 * c_s, plus the advertising relaxation (1 - p)(h_s - c_s).
Exact rationals for single steps, 60-digit mpmath for fixed points.
"""

from fractions import Fraction as F

import mpmath as mp

mp.mp.dps = 60


def step(c, p, h, k):
    out = []
    for s in range(3):
        flux = 0
        for a in range(3):
            if a != s:
                flux += k * (c[s] ** 4 * c[a] - c[a] ** 4 * c[s])
        out.append(c[s] + (1 - p) * (h[s] - c[s]) + flux)
    return out


def fixed_point(c, p, h, k, n=200000):
    c = [mp.mpf(x) for x in c]
    for _ in range(n):
        nxt = step(c, p, h, k)
        if max(abs(nxt[i] - c[i]) for i in range(3)) < mp.mpf(10) ** -50:
            return nxt
        c = nxt
    raise RuntimeError("no convergence")


if __name__ == "__main__":
    p = F(1)
    print("cap p=1 step", [str(x) for x in step([F(1, 2), F(3, 10), F(1, 5)], p, [F(1, 3)] * 3, p)])
    for model, pp, h, c0 in [
        ("cf", "0.4", ("0.3", "0.3", "0.4"), ("0.4", "0.4", "0.2")),
        ("cap", "0.5", ("0.4", "0.3", "0.3"), ("0.4", "0.4", "0.2")),
        ("cf", "0.6", ("0.45", "0.45", "0.1"), ("0.3", "0.3", "0.4")),
    ]:
        pm = mp.mpf(pp)
        k = mp.mpf(1) if model == "cf" else pm
        r = fixed_point([mp.mpf(x) for x in c0], pm, [mp.mpf(x) for x in h], k)
        print(model, pp, h, c0, [mp.nstr(x, 20) for x in r])
