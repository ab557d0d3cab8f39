"""Parseval residual and coefficient decay of the Sobolev expansion against N.

    python3 scripts/convergence_study.py --preset gegenbauer --n 14
"""
import argparse
from dataclasses import replace

from dunkl_sobolev.config import PRESETS
from dunkl_sobolev.fourier import expand, sobolev_error


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", choices=sorted(PRESETS), default="gegenbauer")
    ap.add_argument("--n", type=int, default=14)
    ap.add_argument("--f", help="target function (defaults to the preset's)")
    ap.add_argument("--quad-nodes", type=int, default=200)
    args = ap.parse_args()
    cfg = replace(PRESETS[args.preset], N=args.n, f=args.f or PRESETS[args.preset].f)
    ctx = cfg.context()
    job = expand(ctx, cfg.expr(), args.n, args.quad_nodes)
    norm = float(job.norm_sq)
    print(f"# {args.preset}: f = {cfg.f}, ||f||_s^2 = {norm:.12g}, s_n > 0 through n = {ctx.definite_through}")
    print(f"{'N':>3}{'F_N':>16}{'s_N':>16}{'residual/||f||^2':>20}")
    for n in range(args.n + 1):
        err = float(sobolev_error(job, n, check=False)) / norm
        print(f"{n:>3}{float(job.F[n]):>16.6e}{float(ctx.s[n]):>16.6e}{err:>20.6e}")


if __name__ == "__main__":
    main()
