"""lambda_min and lambda_max of the flux operator against the scaled cutoff, plus the eigenstate q check."""

import argparse

from qarrival.backflow import (FluxSpectrumProblem, extrapolate_lambda, extremal_eigenvalue,
                               modes_for_cutoff, verify_eigenstate_q)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cutoffs", default="10,14,20,28,40")
    args = ap.parse_args()
    cutoffs = [float(v) for v in args.cutoffs.split(",")]
    print("cutoff,modes,lambda_min,lambda_max")
    for u in cutoffs:
        pair = extremal_eigenvalue(FluxSpectrumProblem(u, modes_for_cutoff(u)))
        print(f"{u},{modes_for_cutoff(u)},{pair.lam:.10f},{pair.lam_max:.12f}")
    ex = extrapolate_lambda(cutoffs[-4:] if len(cutoffs) >= 4 else cutoffs)
    print(f"# extrapolated lambda_min = {ex.estimate:.7f} +- {ex.error:.1e}")
    pair = extremal_eigenvalue(FluxSpectrumProblem(20.0, modes_for_cutoff(20.0)))
    chk = verify_eigenstate_q(pair)
    print(f"# eigenstate at cutoff 20: q_grid={chk.q_grid:.6f} lambda(lambda+1)/2={chk.q_formula:.6f} "
          f"momentum route={chk.q_momentum:.6f}")


if __name__ == "__main__":
    main()
