import json
import os
import subprocess
import sys

import numpy as np
import pytest

from bicm_jed._backend import HAVE_NUMBA
from bicm_jed.coding import _bp_np, _scl_np
from bicm_jed.coding.ldpc import default_matrix
from bicm_jed.coding.polar import frozen_mask
from bicm_jed.detector import _np as det_np

from conftest import crandn

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


@pytest.fixture(scope="module")
def nb():
    from bicm_jed.coding import _bp_nb, _scl_nb
    from bicm_jed.detector import _nb as det_nb

    return _scl_nb, _bp_nb, det_nb


def window_stack(rng, n_w, n_d, n_tx, n_rx):
    y = crandn(rng, n_w, n_d, n_rx)
    xp = crandn(rng, n_w, 4, n_tx)
    yp = crandn(rng, n_w, 4, n_rx)
    p = np.einsum("wpt,wpr->wtr", xp.conj(), yp)
    cp = np.einsum("wpt,wps->wts", xp.conj(), xp)
    hk = crandn(rng, n_w, n_tx, n_rx)
    return y, p, cp, hk


class TestKernelParity:
    @pytest.mark.parametrize(
        "family,n_tx,n_d",
        [(det_np.COHERENT, 1, 1), (det_np.COHERENT, 2, 2), (det_np.SIMO, 1, 4), (det_np.RBF, 2, 2), (det_np.LOS, 2, 2)],
    )
    @pytest.mark.parametrize("maxlog", [True, False])
    def test_window_llrs(self, rng, nb, family, n_tx, n_d, maxlog):
        y, p, cp, hk = window_stack(rng, 6, n_d, n_tx, 3)
        args = (y, p, cp, hk, family, 0.7, 0.4, 1.0, maxlog)
        a = nb[2].window_llrs(*args)
        b = det_np.window_llrs(*args)
        assert np.allclose(a, b, rtol=1e-10, atol=1e-9)

    def test_scl_paths(self, rng, nb):
        fz = frozen_mask(64, 48)
        for _ in range(50):
            llr = 3.0 * rng.standard_normal(64)
            ua, ma = nb[0].scl_paths(llr, fz, 8)
            ub, mb = _scl_np.scl_paths(llr, fz, 8)
            assert np.array_equal(ua, ub) and np.allclose(ma, mb, rtol=1e-12)

    def test_bp(self, rng, nb):
        h = default_matrix()
        for _ in range(50):
            llr = 1.5 * rng.standard_normal(h.n_cols) + 2.0
            a = nb[1].bp_flooding(llr, h.check_ptr, h.edge_var, 30)
            b = _bp_np.bp_flooding(llr, h.check_ptr, h.edge_var, 30)
            assert np.array_equal(a[0], b[0]) and bool(a[1]) == bool(b[1]) and int(a[2]) == int(b[2])


SCRIPT = """
import json
from bicm_jed import backend_name
from bicm_jed.harness import SimConfig
from bicm_jed.harness.sim import run_point
cfg = SimConfig.from_dict({"receiver": {"family": "NonCoherentSimoJed", "nd_window": 4}, "trials_per_point": 300, "seed": 5})
p = run_point(cfg, -2.0, trials=300, early_stop_errors=False)
print(json.dumps([backend_name(), p.block_errors]))
"""


def run_with(flag):
    env = dict(os.environ)
    env.pop("BICM_JED_DISABLE_NUMBA", None)
    if flag is not None:
        env["BICM_JED_DISABLE_NUMBA"] = flag
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def test_env_flag_selects_backend_and_matches():
    name_nb, err_nb = run_with(None)
    name_np, err_np = run_with("1")
    assert (name_nb, name_np) == ("numba", "numpy")
    assert err_nb == err_np
    assert run_with("0")[0] == "numba"
