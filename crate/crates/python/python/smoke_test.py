"""Smoke test for the delve_py extension: run with `python python/smoke_test.py`."""

import json

import numpy as np

import delve_py


def main():
    keys = delve_py.key_table("extended")
    assert len(keys) == 43 and keys[5] == (5, "DO", " ")
    assert len(delve_py.key_table("classic")) == 17

    manifest = json.loads(delve_py.layout_manifest("classic"))
    print("classic layout keys:", sorted(manifest)[:6])

    env = delve_py.Env("classic", 3)
    obs = np.frombuffer(env.observation(), dtype="<f4")
    total = 0.0
    for t in range(200):
        reward, done, unlocked = env.step(t % 17)
        total += reward
        if unlocked:
            print(f"step {t}: unlocked {unlocked}")
        if done:
            break
    blob = env.save()
    copy = delve_py.Env.load(blob)
    assert copy.time == env.time and copy.achievements == env.achievements
    print(f"single env: obs len {obs.size}, return {total:.2f}, time {env.time}")

    batch = delve_py.BatchEnv(64, "extended", seed=1, obs="symbolic")
    rng = np.random.default_rng(0)
    obs = np.frombuffer(batch.reset(1), dtype="<f4").reshape(batch.obs_shape)
    dones = 0
    for _ in range(300):
        actions = rng.integers(0, batch.num_actions, size=batch.n_envs, dtype=np.uint8)
        raw, rewards, done = batch.step(actions.tolist())
        obs = np.frombuffer(raw, dtype="<f4").reshape(batch.obs_shape)
        dones += sum(done)
    assert np.isfinite(obs).all()
    m = batch.metrics()
    assert m["steps"] == 300 * 64 and m["episodes"] == dones
    print(f"batch: obs {obs.shape}, episodes {m['episodes']}, pool worlds {m['pool_worlds_generated']}")

    tiles = delve_py.BatchEnv(4, "classic", obs="tiles")
    frame = np.frombuffer(tiles.step([0, 1, 2, 3])[0], dtype=np.uint8).reshape(tiles.obs_shape)
    print("tile frames:", frame.shape)

    p = delve_py.duplication_probability(1024, 0.001, 64)
    assert 0.0 <= p < 1e-6
    print("ok")


if __name__ == "__main__":
    main()
