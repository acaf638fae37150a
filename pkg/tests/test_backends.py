import os
import subprocess
import sys

import numpy as np
import pytest

from risambc import _backend, _pycore, model, montecarlo as mc

compiled = pytest.mark.skipif("compiled" not in _backend.available(), reason="extension not built")


@pytest.fixture(scope="module")
def block(scenario):
    dp = model.derive(replace_ps(scenario, -10.0))
    z = mc._block_normals(123, 0, 4096, mc.n_columns(scenario.M, scenario.Q))
    return z, mc.channel_sd(dp), dp


def replace_ps(s, ps):
    from dataclasses import replace
    return replace(s, ps_dbm=ps)


def test_backend_name_consistent():
    assert _backend.NAME in _backend.available()
    assert _backend.available()[_backend.NAME] is _backend.core


@compiled
def test_sinr_block_bit_identical(scenario, block):
    z, sd, dp = block
    args = (z, scenario.M, scenario.Q, sd, 0.5, 0.01, dp.rho, dp.rho_e)
    np.testing.assert_array_equal(_backend.available()["compiled"].sinr_block(*args), _pycore.sinr_block(*args))


@compiled
def test_outage_block_bit_identical(scenario, block):
    z, sd, dp = block
    for thr in ((2 ** 0.5, 2 ** 0.1), (0.0, 2.0), (4.0, 0.0)):
        args = (z, scenario.M, scenario.Q, sd, 0.5, 0.01, dp.rho, dp.rho_e) + thr
        np.testing.assert_array_equal(_backend.available()["compiled"].outage_block(*args),
                                      _pycore.outage_block(*args))


@compiled
def test_log_sum_exp_identical():
    v = np.random.default_rng(0).normal(0, 50, 1000)
    assert _backend.available()["compiled"].log_sum_exp(v) == _pycore.log_sum_exp(v)


def test_pure_fallback_selected_by_env(tmp_path):
    code = "from risambc import _backend; print(_backend.NAME)"
    env = dict(os.environ, RISAMBC_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
