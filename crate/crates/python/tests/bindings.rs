use pyo3::ffi::c_str;
use pyo3::prelude::*;

use delve_py::delve_py;

const SCRIPT: &std::ffi::CStr = c_str!(
    r#"
import delve_py
keys = delve_py.key_table("extended")
assert len(keys) == 43 and keys[6] == (6, "SLEEP", "Tab"), keys[6]
env = delve_py.Env("classic", 4)
for a in [1, 2, 3, 4, 5, 0]:
    env.step(a)
copy = delve_py.Env.load(env.save())
assert copy.time == env.time == 6
assert [copy.step(5) for _ in range(20)] == [env.step(5) for _ in range(20)]
b = delve_py.BatchEnv(8, "classic", seed=2)
n, length = b.obs_shape
obs, rewards, dones = b.step([0] * 8)
assert len(obs) == 4 * n * length and len(rewards) == len(dones) == 8
try:
    b.step([0] * 7)
    raise AssertionError("short action list accepted")
except ValueError:
    pass
try:
    env.step(17)
    raise AssertionError("invalid action accepted")
except ValueError:
    pass
"#
);

#[test]
fn module_runs_under_embedded_python() {
    pyo3::append_to_inittab!(delve_py);
    Python::attach(|py| py.run(SCRIPT, None, None)).unwrap();
}
