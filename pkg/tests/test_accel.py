import json
import os
import subprocess
import sys

import pytest

from wedgeprob import _accel

PROBE = "import wedgeprob._accel as a, wedgeprob.experiments as e; print(a.USE_NUMBA, e.USE_NUMBA)"


@pytest.mark.parametrize("value,expected", [("0", "False"), ("off", "False"), ("1", str(_accel.HAVE_NUMBA))])
def test_env_flag_selects_path(value, expected):
    env = {**os.environ, "WEDGEPROB_NUMBA": value}
    out = subprocess.run([sys.executable, "-c", PROBE], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == [expected, expected]


def test_numpy_path_gives_same_counts():
    code = ("from wedgeprob.experiments import ExperimentConfig, run_experiment;"
            "r = run_experiment(ExperimentConfig(2, 3, [1, 2], samples=20, master_seed=5)).to_dict();"
            "import json; print(json.dumps(r['records'], sort_keys=True))")
    recs = []
    for value in ("0", "1"):
        env = {**os.environ, "WEDGEPROB_NUMBA": value}
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        recs.append(json.loads(out.stdout))
    for a, b in zip(*recs):
        for key in a:
            if isinstance(a[key], float):
                # determinants are summed in a different order on the two paths
                assert a[key] == pytest.approx(b[key], abs=1e-12), key
            else:
                assert a[key] == b[key], key
