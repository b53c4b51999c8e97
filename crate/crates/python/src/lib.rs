//! Python bindings: single environments, batched stepping, key table,
//! layout manifest and the saved-state format.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use delve::batch::{self, BatchConfig, BatchState};
use delve::codec::{from_bytes, to_bytes};
use delve::engine::step_mut;
use delve::obs::{encode_symbolic, layout_manifest as manifest, render_text, ObsMode};
use delve::{generate_world, Action, Error, GameState, LevelParams, RngStream, Tier};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_)
        | Error::InvalidAction { .. }
        | Error::TierMismatch { .. }
        | Error::LengthMismatch { .. }
        | Error::Codec(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn tier(name: &str) -> PyResult<Tier> {
    Tier::parse(name).map_err(py_err)
}

fn f32_bytes<'py>(py: Python<'py>, v: &[f32]) -> Bound<'py, PyBytes> {
    let mut raw = Vec::with_capacity(v.len() * 4);
    for x in v {
        raw.extend_from_slice(&x.to_le_bytes());
    }
    PyBytes::new(py, &raw)
}

/// `(id, name, key)` for every action of the tier.
#[pyfunction]
#[pyo3(signature = (tier_name = "extended"))]
fn key_table(tier_name: &str) -> PyResult<Vec<(u8, &'static str, &'static str)>> {
    let t = tier(tier_name)?;
    Ok(Action::ALL[..t.action_count()].iter().map(|a| (a.id(), a.name(), a.key())).collect())
}

/// Symbolic observation layout as JSON.
#[pyfunction]
#[pyo3(signature = (tier_name = "extended"))]
fn layout_manifest(tier_name: &str) -> PyResult<String> {
    Ok(manifest(tier(tier_name)?).to_json())
}

/// Probability that `n` environments finishing with probability `p` each
/// need more than `m` fresh worlds in one batch step.
#[pyfunction]
fn duplication_probability(n: u32, p: f64, m: u32) -> PyResult<f64> {
    batch::duplication_probability(n, p, m).map_err(py_err)
}

/// One environment stepped directly.
#[pyclass(module = "delve_py")]
struct Env {
    state: GameState,
}

#[pymethods]
impl Env {
    #[new]
    #[pyo3(signature = (tier_name = "extended", seed = 0))]
    fn new(tier_name: &str, seed: u64) -> PyResult<Self> {
        let t = tier(tier_name)?;
        let world = Arc::new(generate_world(&LevelParams::new(seed, t)));
        let state = delve::reset(world, t, RngStream::from_seed(seed)).map_err(py_err)?;
        Ok(Env { state })
    }

    /// Returns `(reward, done, newly_unlocked)`.
    fn step(&mut self, action: u8) -> PyResult<(f32, bool, Vec<&'static str>)> {
        let r = step_mut(&mut self.state, action).map_err(py_err)?;
        Ok((r.reward, r.done, r.newly_unlocked.iter().map(|a| a.name()).collect()))
    }

    /// Symbolic observation as little-endian f32 bytes.
    fn observation<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        f32_bytes(py, &encode_symbolic(&self.state))
    }

    fn text(&self) -> Vec<String> {
        render_text(&self.state)
    }

    #[getter]
    fn time(&self) -> u32 {
        self.state.time
    }

    #[getter]
    fn done(&self) -> bool {
        self.state.done
    }

    #[getter]
    fn achievements(&self) -> Vec<&'static str> {
        self.state.achievements.iter().map(|a| a.name()).collect()
    }

    /// Saved-state bytes (DLVE header + payload).
    fn save<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &to_bytes(&self.state))
    }

    #[staticmethod]
    fn load(blob: &[u8]) -> PyResult<Self> {
        Ok(Env { state: from_bytes(blob).map_err(py_err)? })
    }
}

/// `n_envs` environments stepped together with optimistic resets.
#[pyclass(module = "delve_py")]
struct BatchEnv {
    cfg: BatchConfig,
    inner: BatchState,
}

#[pymethods]
impl BatchEnv {
    #[new]
    #[pyo3(signature = (n_envs, tier_name = "extended", seed = 0, obs = "symbolic", reset_ratio = 16, max_episode_length = None, threads = 0))]
    fn new(
        n_envs: u32,
        tier_name: &str,
        seed: u64,
        obs: &str,
        reset_ratio: u32,
        max_episode_length: Option<u32>,
        threads: u32,
    ) -> PyResult<Self> {
        let mut cfg = BatchConfig::new(n_envs, tier(tier_name)?);
        cfg.obs = ObsMode::parse(obs).map_err(py_err)?;
        cfg.reset_ratio = reset_ratio;
        cfg.worker_threads = threads;
        if let Some(m) = max_episode_length {
            cfg.max_episode_length = m;
        }
        let inner = batch::batch_reset(cfg.clone(), seed).map_err(py_err)?;
        Ok(BatchEnv { cfg, inner })
    }

    /// Restarts every environment from `seed`; returns the observations.
    fn reset<'py>(&mut self, py: Python<'py>, seed: u64) -> PyResult<Bound<'py, PyBytes>> {
        self.inner = batch::batch_reset(self.cfg.clone(), seed).map_err(py_err)?;
        Ok(self.obs_bytes(py))
    }

    /// Steps every environment. Returns `(obs, rewards, dones)`; finished
    /// environments are already reset and `obs` shows their new episode.
    fn step<'py>(&mut self, py: Python<'py>, actions: Vec<u8>) -> PyResult<(Bound<'py, PyBytes>, Vec<f32>, Vec<bool>)> {
        let out = py.detach(|| batch::batch_step(&mut self.inner, &actions)).map_err(py_err)?;
        Ok((self.obs_bytes(py), out.rewards, out.dones))
    }

    /// Shape of one batch of observations: `(N, len)` symbolic,
    /// `(N, h, w, 3)` tiles, `(N, 0)` none.
    #[getter]
    fn obs_shape(&self) -> Vec<usize> {
        let n = self.cfg.n_envs as usize;
        match self.cfg.obs {
            ObsMode::Tiles => {
                let (rows, cols) = self.cfg.tier.view();
                let px = self.cfg.tile_px as usize;
                vec![n, (rows + delve::obs::strip_rows(self.cfg.tier)) * px, cols * px, 3]
            }
            _ => vec![n, self.cfg.obs_len()],
        }
    }

    /// `"f32"` for symbolic observations, `"u8"` for tiles.
    #[getter]
    fn obs_dtype(&self) -> &'static str {
        if self.cfg.obs == ObsMode::Tiles {
            "u8"
        } else {
            "f32"
        }
    }

    #[getter]
    fn n_envs(&self) -> u32 {
        self.cfg.n_envs
    }

    #[getter]
    fn num_actions(&self) -> usize {
        self.cfg.tier.action_count()
    }

    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = self.inner.metrics();
        let d = PyDict::new(py);
        d.set_item("steps", m.steps)?;
        d.set_item("episodes", m.episodes)?;
        d.set_item("pool_worlds_generated", m.pool_worlds_generated)?;
        d.set_item("duplicate_resets", m.duplicate_resets)?;
        d.set_item("return_sum", m.return_sum)?;
        d.set_item("length_sum", m.length_sum)?;
        d.set_item("achievement_episodes", m.achievement_episodes.clone())?;
        Ok(d)
    }

    /// Saved-state bytes of environment `i`, loadable with `Env.load`.
    fn save_env<'py>(&self, py: Python<'py>, i: usize) -> PyResult<Bound<'py, PyBytes>> {
        let s = self.inner.envs().get(i).ok_or_else(|| PyValueError::new_err(format!("no environment {i}")))?;
        Ok(PyBytes::new(py, &to_bytes(s)))
    }
}

impl BatchEnv {
    fn obs_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        match self.cfg.obs {
            ObsMode::Tiles => PyBytes::new(py, self.inner.frames()),
            _ => f32_bytes(py, self.inner.observations()),
        }
    }
}

#[pymodule]
pub fn delve_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Env>()?;
    m.add_class::<BatchEnv>()?;
    m.add_function(wrap_pyfunction!(key_table, m)?)?;
    m.add_function(wrap_pyfunction!(layout_manifest, m)?)?;
    m.add_function(wrap_pyfunction!(duplication_probability, m)?)?;
    Ok(())
}
