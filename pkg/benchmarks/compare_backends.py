"""Compare the master-equation propagation backends.

Times each backend on a toy ladder and on the full 64-state cycling-scheme
workload, and reports the deviation against the dense-eigendecomposition
reference where it is available.

Usage: python benchmarks/compare_backends.py [--duration 3e-6]
"""

import argparse
import time

import numpy as np

from sseit.hamiltonian import build_rwa_hamiltonian
from sseit.lindblad import DensityMatrix, collapse_operators
from sseit.propagators import propagate
from sseit.schemes import scheme1, toy_model


def run_case(name, config, backends, duration, samples=151):
    reg = config.registry
    h = build_rwa_hamiltonian(config).entries
    jumps = [j.matrix for j in collapse_operators(reg)]
    rho0 = DensityMatrix.from_state(config.protected_states[0], reg).entries
    times = np.linspace(0.0, duration, samples)

    print(f"\n{name} (dimension {reg.dimension}, {duration * 1e6:.1f} us, "
          f"{samples} samples)")
    reference = None
    for backend in backends:
        start = time.perf_counter()
        rhos = propagate(h, jumps, rho0, times, backend=backend)
        elapsed = time.perf_counter() - start
        trace_err = float(np.abs(np.einsum("tii->t", rhos) - 1.0).max())
        if reference is None:
            reference = rhos
            dev = 0.0
        else:
            dev = float(np.max(np.abs(rhos - reference)))
        print(f"  {backend:5s}: {elapsed:8.2f} s   max trace error {trace_err:.2e}"
              f"   deviation vs {backends[0]}: {dev:.2e}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--duration", type=float, default=3e-6)
    args = parser.parse_args()

    run_case("toy 3-level ladder", toy_model(3, protection_intensity=100.0),
             ["eig", "cheb", "expm", "rk"], args.duration)
    run_case("toy 6-level ladder", toy_model(6, protection_intensity=1e3),
             ["eig", "cheb", "expm", "rk"], args.duration)
    run_case("full cycling scheme, far ground level as sink",
             scheme1(1e3).replace(spectator_sink=True),
             ["cheb", "expm"], args.duration)
    run_case("full cycling scheme, all couplings",
             scheme1(1e3),
             ["cheb", "expm"], args.duration)


if __name__ == "__main__":
    main()
