import os

# numba (via galois) defaults to the GNU OpenMP threading layer, which aborts
# when the harness's ProcessPoolExecutor forks; use the fork-safe layer.
os.environ.setdefault('NUMBA_THREADING_LAYER', 'workqueue')
