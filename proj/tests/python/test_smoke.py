import json
import math
import os
import subprocess

import numpy as np
import pytest

import scapegeom as sg


def camera(w=16, h=12, f=20.0, t=(0.0, 0.0, 0.0)):
    return sg.Camera(sg.Intrinsics(f, f, w / 2, h / 2, w, h), sg.Pose(np.eye(3), np.array(t)))


def test_projection_round_trip():
    rng = np.random.default_rng(0)
    cam = camera()
    rgb = rng.integers(0, 256, size=(12, 16, 3)) / 255.0
    depth = rng.uniform(0.5, 50.0, size=(12, 16))
    depth[3, 4] = 0.0
    pos, col = sg.back_project(rgb, depth, cam)
    assert pos.shape == (12 * 16 - 1, 3)
    out_rgb, out_depth, mask = sg.render_points(pos, col, cam)
    assert mask[3, 4] == 0 and mask.sum() == 12 * 16 - 1
    valid = depth > 0
    np.testing.assert_array_equal(out_rgb[valid], rgb[valid])
    np.testing.assert_allclose(out_depth[valid], depth[valid], rtol=1e-12)


def test_render_nearest_point_wins():
    cam = camera()
    pos = np.array([[0.0, 0.0, 5.0], [0.0, 0.0, 2.0]])
    col = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    rgb, depth, mask = sg.render_points(pos, col, cam)
    assert depth[6, 8] == 2.0
    assert tuple(rgb[6, 8]) == (0.0, 1.0, 0.0)


def test_warp_loss_trimming():
    x = np.zeros((10, 10, 4))
    x[...] = 0.1
    x[6, 3] = 10.0
    h = np.zeros_like(x)
    mask = np.ones((10, 10), dtype=np.uint8)
    r = sg.warp_loss(x, h, mask, trim=0.05)
    assert r["loss"] == pytest.approx(0.01, abs=1e-12)
    assert r["trimmed_pixels"] == 5 and r["kept_pixels"] == 95


def test_warp_loss_gradient_matches_finite_difference():
    rng = np.random.default_rng(1)
    x = rng.uniform(0, 1, (4, 5, 4))
    h = rng.uniform(0, 1, (4, 5, 4))
    mask = (rng.uniform(size=(4, 5)) < 0.7).astype(np.uint8)
    g = sg.warp_loss_gradient(x, h, mask, trim=0.0, depth_weight=2.0)
    eps = 1e-6
    i = np.unravel_index(np.argmax(mask), mask.shape) + (3,)
    xp, xm = x.copy(), x.copy()
    xp[i] += eps
    xm[i] -= eps
    fd = (sg.warp_loss(xp, h, mask, 0.0, 2.0)["loss"] - sg.warp_loss(xm, h, mask, 0.0, 2.0)["loss"]) / (2 * eps)
    assert g[i] == pytest.approx(fd, rel=1e-6)


def test_filter_and_keyframes():
    kept = sg.filter_dataset([5.0, 1.0, 4.0, 2.0, 3.0], 0.2)
    assert kept == [1, 2, 3, 4]
    k = sg.Intrinsics(20, 20, 8, 6, 16, 12)
    poses = [sg.Pose(np.eye(3), np.array([0.0, 0.0, float(i)])) for i in range(31)]
    assert sg.select_keyframes(k, poses) == [0, 10, 20, 30]


def test_depth_codec():
    codes = np.arange(0, 65536, dtype=np.uint16)
    meters = sg.decode_depth16(codes)
    np.testing.assert_array_equal(sg.encode_depth16(meters), codes)
    assert sg.encode_depth16(np.array([400.0]))[0] == 65535


def test_sampler_is_seeded_and_calibrated():
    a = sg.sample_gaussian(1.5, 1.0, steps=50, seed=3, count=4000, variance="forward")
    b = sg.sample_gaussian(1.5, 1.0, steps=50, seed=3, count=4000, variance="forward")
    np.testing.assert_array_equal(a, b)
    assert abs(a.mean() - 1.5) < 3 / math.sqrt(4000)
    assert abs(a.var(ddof=1) - 1.0) < 0.1


def test_boxes_and_mask():
    cam = camera(64, 48, 40.0)
    sem, ori = sg.rasterize_boxes([((0.0, 0.0, 10.0), (4.0, 2.0, 2.0), 0.0, "vehicle")], cam)
    assert sem.shape == (48, 64, 3) and sem.any() and ori.any()
    mask = np.zeros((16, 16), dtype=np.uint8)
    mask[:8, :8] = 1
    np.testing.assert_array_equal(sg.downsample_mask(mask, 8), [[1, 0], [0, 0]])


def test_errors_are_typed():
    with pytest.raises(sg.Error):
        sg.Intrinsics(-1, 1, 0, 0, 4, 4)
    with pytest.raises(sg.Error):
        sg.filter_dataset([1.0], 1.5)
    with pytest.raises(ValueError):
        sg.warp_loss(np.zeros((2, 2, 4)), np.zeros((2, 3, 4)), np.ones((2, 2), dtype=np.uint8))


@pytest.mark.skipif("SCAPEGEOM_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_pipeline(tmp_path):
    cli = os.environ["SCAPEGEOM_CLI"]
    subprocess.run([cli, "demo-scene", "--out", str(tmp_path / "demo")], check=True, capture_output=True)
    out = subprocess.run(
        [
            cli, "pipeline",
            "--scene", str(tmp_path / "demo" / "scene.json"),
            "--trajectory", str(tmp_path / "demo" / "trajectory.json"),
            "--out", str(tmp_path / "scene"),
            "--trim", "0",
        ],
        check=True, capture_output=True, text=True,
    )
    result = json.loads(out.stdout)
    assert result["keyframes"] == [0, 10, 20, 30]
    assert result["warp_losses"][1:] == [0.0, 0.0, 0.0]
    bad = subprocess.run([cli, "filter", "--drop", "0.2"], capture_output=True)
    assert bad.returncode == 2
