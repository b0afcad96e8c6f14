import numpy as np
import pytest

from bicm_jed.modem import GridLayout, build_grid, dmrs_generate, partition_windows, qpsk_map

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"CRITERION {k}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_bits(rng, n):
    return rng.integers(0, 2, n, dtype=np.uint8)


def observed_window(rng, n_d=4, n_tx=1, n_rx=4, n0=0.5, beta=1.0, h=None, noise=True, index=0, mode=None):
    """One detection window of a freshly transmitted 4-PRB frame.

    Returns ``(window, h, data_symbols)``, with ``h`` shaped ``(n_tx, n_rx)``
    and ``data_symbols`` shaped ``(n_d, n_tx)`` for the chosen window.
    """
    layout = GridLayout()
    bits = random_bits(rng, layout.coded_bits(n_tx))
    data = qpsk_map(bits)
    grid = build_grid(data, dmrs_generate(3, layout.n_pilot), layout, beta, n_tx)
    if h is None:
        h = crandn(rng, n_tx, n_rx)
    h = np.asarray(h, np.complex128).reshape(n_tx, n_rx)
    y = h.T @ grid.symbols
    if noise:
        y = y + np.sqrt(n0) * crandn(rng, n_rx, layout.n_total)
    win = partition_windows(layout, n_d, n_tx)[index].observe(grid, y)
    sym = grid.symbols[:, win.data_indices].T
    return win, h, sym


def candidates(n_d, n_tx):
    """Data completions ordered so local bit b of candidate t is (t >> b) & 1."""
    nb = 2 * n_d * n_tx
    out = []
    for t in range(1 << nb):
        bits = [(t >> b) & 1 for b in range(nb)]
        out.append(qpsk_map(bits).reshape(n_d, n_tx))
    return out


def full_x(win, data):
    """Window transmit matrix (REs x n_tx) with pilots followed by data."""
    return np.concatenate([win.x_pilot.T, data], axis=0)


def full_y(win):
    return np.concatenate([win.y_pilot, win.y_data], axis=1)  # (n_rx, REs)
