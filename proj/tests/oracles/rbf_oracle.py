"""Design matrix, posterior predictive summaries and sampler formulas on small fixed instances."""
import math

import numpy as np

X = np.array([[0.1, 0.2], [0.4, 0.9], [0.7, 0.3]])
CENTERS = np.array([[0.2, 0.2], [0.5, 0.5], [0.9, 0.1]])
SCALES = np.array([1.5, 2.0, 0.7])

BETAS = np.array([[0.5, -0.2, 1.0], [0.4, 0.1, 0.8], [0.7, -0.4, 1.1], [0.3, 0.0, 0.9], [0.6, -0.1, 1.3]])
Y_MEAN = 0.25
X_TEST = np.array([0.3, 0.6])


def design(points, centers, scales):
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return np.exp(-(scales[None, :] ** 2) * d2)


def type7(v, p):
    return float(np.quantile(v, p, method="linear"))


if __name__ == "__main__":
    D = design(X, CENTERS, SCALES)
    for i in range(3):
        print("D[%d] = %s" % (i, ", ".join("%.17g" % v for v in D[i])))
    r = design(X_TEST[None, :], CENTERS, SCALES)[0]
    draws = BETAS @ r
    print("draws = %s" % ", ".join("%.17g" % v for v in draws))
    print("mean = %.17g" % (draws.mean() + Y_MEAN))
    print("variance = %.17g" % draws.var(ddof=1))
    print("cib = %.17g" % (type7(draws, 0.975) - type7(draws, 0.025)))

    # zeta0 for nu0 = 2: P(IG(1, z/2) <= t) = exp(-z/(2t)) = 0.99.
    print("zeta0(nu0=2, sd=1.7) = %.17g" % (-2 * 1.7 * math.log(0.99)))

    # Scale acceptance, single data point: y = 1, x = 0, mu = 0.3, beta = 1, sigma2 = 0.5, a_s = 2, b_s = 0.5.
    y, mu, beta, sig2, a_s, b_s = 1.0, 0.3, 1.0, 0.5, 2.0, 0.5
    def rss(s):
        return (y - beta * math.exp(-s * s * mu * mu)) ** 2
    s, s_new = 1.2, 2.1
    ratio = math.exp(-(rss(s_new) - rss(s)) / (2 * sig2)) * (s_new ** (a_s - 1) * math.exp(-b_s * s_new)) / (
        s ** (a_s - 1) * math.exp(-b_s * s))
    print("scale acceptance = %.17g" % min(1.0, ratio))
    s_new = 0.4
    ratio = math.exp(-(rss(s_new) - rss(s)) / (2 * sig2)) * (s_new ** (a_s - 1) * math.exp(-b_s * s_new)) / (
        s ** (a_s - 1) * math.exp(-b_s * s))
    print("scale acceptance (shrink) = %.17g" % min(1.0, ratio))

    # Inclusion probability at beta = 10*C*tau with C = 25, tau = 0.1, p = 0.5.
    c, tau, b = 25.0, 0.1, 25.0
    p1 = 0.5 / (c * tau) * math.exp(-b * b / (2 * c * c * tau * tau))
    p0 = 0.5 / tau * math.exp(-b * b / (2 * tau * tau))
    print("inclusion(|beta| = 10 C tau) = %.17g" % (p1 / (p1 + p0)))
