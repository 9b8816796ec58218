import random
import subprocess
import sys

import pytest

from nilcsp import _kernel
from nilcsp.fixtures import named

from helpers import random_element

BACKENDS = _kernel.available_backends()


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert _kernel.BACKEND in ("python", "cython")


@pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")
@pytest.mark.parametrize("name", ("HEIS", "F32", "F23", "NG2", "HEIS3"))
def test_backends_agree(name):
    p = named(name)
    cols = {k: p.build_collector(cls) for k, cls in BACKENDS.items()}
    rng = random.Random(name)
    for _ in range(200):
        a, b = random_element(p, rng).exps, random_element(p, rng).exps
        m = rng.randint(-5, 5)
        outs = {k: (c.mul(a, b), c.inv(a), c.pow(a, m), c.comm(a, b)) for k, c in cols.items()}
        assert outs["python"] == outs["cython"]


def test_pure_fallback_selected_by_environment():
    code = "from nilcsp import _kernel; print(_kernel.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env={"NILCSP_PURE": "1", "PATH": ""},
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
