"""Benchmark the compiled Taylor kernel against the pure-Python fallback.

Both backends must produce bit-identical results (asserted here); the only
difference is speed. Run:  python benchmarks/bench_backends.py [steps]
"""
import sys
import time

from ertbp import _taylor_pure
from ertbp.dynamics import reference_initial_state, reference_params
from ertbp.precision import digits_to_bits
from ertbp.taylor import REFERENCE_STEP, reference_config

try:
    from ertbp import _taylor_core
except ImportError:
    _taylor_core = None


def run(kernel, n_steps):
    params = reference_params()
    config = reference_config()
    state = reference_initial_state()
    args = (
        tuple(str(x) for x in (state.theta, *state.z, *state.v)),
        str(params.e), str(params.mu), REFERENCE_STEP, n_steps, None,
        config.order, digits_to_bits(config.precision_digits), True,
        config.collision_floor,
    )
    start = time.perf_counter()
    out = kernel.advance(*args)
    return time.perf_counter() - start, out


def main():
    n_steps = int(sys.argv[1]) if len(sys.argv) > 1 else 10000
    t_pure, out_pure = run(_taylor_pure, n_steps)
    print(f"pure     : {t_pure:8.3f} s  ({n_steps} steps, order 9, 35 digits)")
    if _taylor_core is None:
        print("compiled : not built")
        return
    t_comp, out_comp = run(_taylor_core, n_steps)
    print(f"compiled : {t_comp:8.3f} s  ({n_steps} steps, order 9, 35 digits)")
    assert out_pure == out_comp, "backends disagree bit-for-bit"
    print(f"speedup  : {t_pure / t_comp:8.2f} x   (outputs bit-identical)")


if __name__ == "__main__":
    main()
