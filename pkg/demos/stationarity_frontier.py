"""Where does a GARCH(1, 1) process stop being stationary?

The process y_k = sigma_k eps_k has a strictly stationary solution exactly
when E log(beta + alpha eps^2) < 0.  That region is much larger than the
second-order condition alpha + beta < 1: with normal innovations even
alpha + beta > 1 can still be stationary (with infinite variance).

Run with: python3 demos/stationarity_frontier.py
"""

import numpy as np

from garchest import GarchParams, garch11_criterion, normal_innovations


def main():
    beta = 0.5
    print(f"beta fixed at {beta}; scanning alpha for the sign change of")
    print("gamma = E log(beta + alpha eps^2), normal innovations\n")
    print(f"{'alpha':>8} {'alpha+beta':>11} {'gamma':>9} {'+-2se':>8}  verdict")
    for alpha in (0.2, 0.4, 0.6, 0.7, 0.75, 0.8, 1.0):
        est = garch11_criterion(
            GarchParams(0.1, [alpha], [beta]), normal_innovations(), 10**6, seed=7
        )
        print(f"{alpha:8.2f} {alpha + beta:11.2f} {est.gamma:9.4f} "
              f"{2 * est.std_error:8.4f}  {est.verdict}")

    print("\nnote how alpha + beta = 1.2 is still stationary even though the")
    print("variance is infinite there: the log of the random factor decides,")
    print("not its mean.")

    # the deterministic edge case: no ARCH feedback at all
    for b in (0.95, 1.05):
        est = garch11_criterion(GarchParams(0.1, [0.0], [b]), normal_innovations())
        print(f"\nalpha = 0, beta = {b}: gamma = log(beta) = {est.gamma:.6f} "
              f"exactly, verdict {est.verdict}")


if __name__ == "__main__":
    main()
