"""High-precision reference values for tests/oracles.rs.

Run with `python3 frozen_values.py`; every printed line is pasted into the
Rust test as a constant. Needs mpmath.
"""
from mpmath import mp, mpf, loggamma, gammainc, erfc, sqrt, exp, quad, findroot, pi, gamma

mp.dps = 40


def show(name, value):
    print(f"{name} = {mp.nstr(value, 20)}")


for x in ["0.3", "7.5", "150.25"]:
    show(f"ln_gamma({x})", loggamma(mpf(x)))

for a, x in [("0.5", "0.2"), ("3", "2.5"), ("50", "60"), ("100.5", "90")]:
    show(f"P({a}, {x})", gammainc(mpf(a), 0, mpf(x), regularized=True))

show("chisq_upper(199, 248.3)", gammainc(mpf(199) / 2, mpf("248.3") / 2, mp.inf, regularized=True))
show("abs_normal_tail(2.5)", erfc(mpf("2.5") / sqrt(2)))


def two_sided(d, t):
    d = mpf(d)
    spread = t * sqrt(d)
    up = gammainc(d / 2, (d + spread) / 2, mp.inf, regularized=True)
    lo = gammainc(d / 2, 0, (d - spread) / 2, regularized=True) if d - spread > 0 else 0
    return up + lo


show("s1(0.01)", findroot(lambda s: erfc(s / sqrt(2)) - mpf("0.01"), 2.5))
show("s2(p=200, 0.01)", findroot(lambda t: two_sided(199, t) - mpf("0.01"), 3.6))
show("wishart_eps(200)", exp(-mpf(200) / (2 * (sqrt(5) + 2) ** 2)))


def mp_functional(c, lam):
    c = mpf(c)
    a, b = (1 - sqrt(c)) ** 2, (1 + sqrt(c)) ** 2
    f = lambda x: sqrt((b - x) * (x - a)) / (2 * pi * x * c)
    return quad(lambda x: f(x) * x / (lam - x), [a, b])


show("mp_functional(c=4, lam=12)", mp_functional(4, mpf(12)))
show("mp_functional(c=0.25, lam=3)", mp_functional(mpf("0.25"), mpf(3)))
show("mp_mass(c=0.25)", quad(lambda x: sqrt(((mpf(9)/4) - x) * (x - mpf(1)/4)) / (2 * pi * x * mpf("0.25")), [mpf(1)/4, mpf(9)/4]))


def uniform_T(alpha, c):
    return alpha + c * alpha * quad(lambda r: r / (alpha - r), [mpf("0.5"), mpf("1.5")])


def uniform_dT(alpha, c):
    return 1 - c * quad(lambda r: (r / (alpha - r)) ** 2, [mpf("0.5"), mpf("1.5")])


for c in [4, 100]:
    a = findroot(lambda al: uniform_dT(al, c), 1.5 + 1.2 * sqrt(c))
    show(f"uniform alpha_star(c={c})", a)
    show(f"uniform norm(c={c})", uniform_T(a, c))


def stieltjes(z, c):
    g = lambda m: m - quad(lambda t: 1 / (t * (1 - c - c * z * m) - z), [mpf("0.5"), mpf("1.5")])
    return findroot(g, -1 / mpf(z))


show("uniform m(z=20, c=4)", stieltjes(mpf(20), mpf(4)))

p, n = 50, 100
show("sin_theta_mean(p=50,n=100,s=0.01,k=1)", mpf("0.01") / sqrt(n) * sqrt(2) * gamma(mpf(p) / 2) / gamma(mpf(p - 1) / 2))
