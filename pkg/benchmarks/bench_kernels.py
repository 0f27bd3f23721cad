"""Compare the compiled and pure-Python elimination kernels.

Times ``gf2_rank`` and ``int_diagonal`` on boundary matrices of a few
complexes.  Usage: ``python benchmarks/bench_kernels.py [A3 B3 C3 ...]``.
"""
import argparse
import time

from tomei import kernels
from tomei.complex import CellComplex
from tomei.homology import _divisibility_chain
from tomei.roots import parse_diagram
from tomei.signs import parse_marking


def best_of(fn, arg, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(arg)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("diagrams", nargs="*", default=["A3", "B3", "C3"])
    p.add_argument("--marking", default="standard")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    backends = [b for b in (kernels.compiled_backend, kernels.python_backend) if b is not None]
    if kernels.compiled_backend is None:
        print("compiled kernels not built; timing the Python fallback only")
    print(f"{'matrix':<22}{'shape':>14}{'kernel':>14}" + "".join(f"{b.BACKEND:>11}" for b in backends) + f"{'speedup':>10}")
    for label in args.diagrams:
        d = parse_diagram(label)
        cx = CellComplex(parse_marking(d, args.marking))
        for k in range(1, d.rank + 1):
            D = cx.boundary_matrix(k).toarray()
            for name in ("gf2_rank", "int_diagonal"):
                times, results = [], []
                for b in backends:
                    t, out = best_of(getattr(b, name), D, args.repeat)
                    times.append(t)
                    results.append(_divisibility_chain(out) if name == "int_diagonal" else out)
                assert all(r == results[0] for r in results), f"backends disagree on {label} d_{k}"
                speed = f"{times[-1] / times[0]:>9.1f}x" if len(times) > 1 else ""
                row = f"{label + ' d_' + str(k):<22}{str(D.shape):>14}{name:>14}"
                print(row + "".join(f"{t * 1e3:>9.1f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
