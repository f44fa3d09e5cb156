"""Generate high-precision reference constants used as frozen test fixtures.

Run manually; paste the printed values into the tests.  Requires mpmath.
"""

import mpmath as mp

mp.mp.dps = 40

Z = [mp.e ** (2j * mp.pi * k / 3) for k in range(3)]


def s(p, z):
    return sum(Z[k] ** (-p) * mp.e ** (z * Z[k]) for k in range(3)) / 3


def main():
    print("# s_p values at z = 1")
    for p in range(3):
        v = s(p, mp.mpf(1))
        print(f"s{p}(1) = {mp.nstr(v.real, 25)} + {mp.nstr(v.imag, 25)}j")

    print("\n# s_p values at z = 2 - 1j")
    for p in range(3):
        v = s(p, mp.mpc(2, -1))
        print(f"s{p}(2-1j) = {mp.nstr(v.real, 25)} {mp.nstr(v.imag, 25)}j")

    # Two-bound-state closed form at parameters (1, -1), x = 0.
    mu, nu = mp.mpf(1), mp.mpf(-1)
    z1, z2 = Z[1], Z[2]
    x = mp.mpf(0)
    kap = z1 * mp.e ** (-mp.sqrt(3) * mu * x)
    kaph = z2 * mp.e ** (mp.sqrt(3) * nu * x)
    a11 = kap / (mu - mu * z2) ** 2
    a12 = 1 / (mu - nu) ** 2 + kaph / (mu - nu * z1) ** 2
    a21 = 1 / (nu - mu) ** 2 + kap / (nu - mu * z2) ** 2
    a22 = kaph / (nu - nu * z1) ** 2
    det = a11 * a22 - a12 * a21
    r1 = (-a22 + a12) / det
    r1h = (-a11 + a21) / det
    print("\n# closed form at (mu, nu) = (1, -1), x = 0")
    print(f"det  = {mp.nstr(det.real, 25)} {mp.nstr(det.imag, 25)}j")
    print(f"R1   = {mp.nstr(r1.real, 25)} {mp.nstr(r1.imag, 25)}j")
    print(f"R1h  = {mp.nstr(r1h.real, 25)} {mp.nstr(r1h.imag, 25)}j")


if __name__ == "__main__":
    main()
