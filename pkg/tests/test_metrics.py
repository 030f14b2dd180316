import math

import numpy as np
import pytest

from qdm.channels import ChannelKind, ChannelSpec, apply_channel_trajectory, exact_channel_density
from qdm.dataset import ClassKind, ClassSpec, SampleParams, class_state
from qdm.imaging import dist_to_image
from qdm.metrics import fidelity_report, image_metrics, p_succ, psnr_from_mse, q_average
from qdm.rng import stream
from qdm.statevector import basis_state

GHZ8 = ClassSpec(ClassKind.GHZ, 8)
W8 = ClassSpec(ClassKind.W, 8)
UNIFORM = np.full(256, 1 / 256)

# (class, noise, mse before, psnr before, mse after, psnr after) as printed
REFERENCE_TABLE = [
    ("GHZ", "Rx", 0.48, 51.33, 0.0051, 71.14),
    ("W", "Rx", 0.49, 51.25, 0.0241, 64.35),
    ("GHZ", "Ry", 0.59, 50.43, 0.0488, 61.28),
    ("W", "Ry", 0.73, 49.56, 0.0662, 59.96),
    ("GHZ", "e3", 0.79, 49.20, 0.07, 59.98),
    ("W", "e3", 0.98, 48.25, 0.15, 56.40),
]


def test_p_succ_examples():
    assert p_succ(np.abs(class_state(SampleParams(GHZ8, [0.6, 0.8j])).amplitudes) ** 2, GHZ8) == 1.0
    assert p_succ(UNIFORM, GHZ8) == pytest.approx(2 / 256, abs=1e-15)
    assert p_succ(UNIFORM, W8) == pytest.approx(8 / 256, abs=1e-15)
    with pytest.raises(ValueError):
        p_succ(np.ones(4) / 4, GHZ8)


def test_p_succ_linear_and_permutation_invariant(rng):
    a, b = rng.dirichlet(np.ones(256)), rng.dirichlet(np.ones(256))
    assert p_succ(0.3 * a + 0.7 * b, W8) == pytest.approx(0.3 * p_succ(a, W8) + 0.7 * p_succ(b, W8), abs=1e-14)
    perm = np.arange(256)
    off = np.setdiff1d(perm, W8.support())
    perm[off] = rng.permutation(off)
    assert p_succ(a[perm], W8) == pytest.approx(p_succ(a, W8), abs=1e-15)


def test_q_average():
    one = q_average([np.eye(256)[0]], GHZ8)
    assert one.q == 1.0 and one.count == 1
    two = q_average([np.eye(256)[0], np.eye(256)[3]], GHZ8)
    assert two.q == 0.5 and two.values == (1.0, 0.0)
    with pytest.raises(ValueError):
        q_average([], GHZ8)


def test_identical_images():
    img = dist_to_image(UNIFORM, 8)
    m = image_metrics(img, img)
    assert m.mse == 0 and m.psnr == math.inf and m.snr == math.inf


def test_psnr_examples():
    assert psnr_from_mse(0.0051) == pytest.approx(71.06, abs=0.005)
    assert psnr_from_mse(0.48) == pytest.approx(51.32, abs=0.005)


@pytest.mark.parametrize("row", REFERENCE_TABLE, ids=lambda r: f"{r[0]}-{r[1]}")
def test_table_psnr_consistency(row):
    _, _, *pairs = row
    for mse, printed in (pairs[:2], pairs[2:]):
        decimals = len(repr(mse).split(".")[1])
        half = 0.5 * 10.0**-decimals
        lo, hi = psnr_from_mse(mse + half), psnr_from_mse(mse - half)
        assert lo <= psnr_from_mse(mse) <= hi
        assert lo - 0.1 <= printed <= hi + 0.1


def test_psnr_at_least_snr(rng):
    clean = dist_to_image(rng.dirichlet(np.ones(256)), 8)
    test = dist_to_image(rng.dirichlet(np.ones(256)), 8)
    m = image_metrics(clean, test)
    assert m.psnr >= m.snr
    assert m.psnr == pytest.approx(10 * math.log10(255**2 / m.mse))


def test_image_shape_mismatch():
    with pytest.raises(ValueError):
        image_metrics(np.zeros((2, 2)), np.zeros((4, 2)))


def test_fidelity_report():
    s = class_state(SampleParams(GHZ8, [0.6, 0.8]))
    assert fidelity_report(s, s) == pytest.approx(1.0)
    assert fidelity_report(basis_state(8, 0), basis_state(8, 1)) == 0.0


def test_fidelity_after_weak_e3():
    spec = ChannelSpec(ChannelKind.E3, 0.1)
    two = class_state(SampleParams(ClassSpec(ClassKind.GHZ, 2), [0.6, 0.8]))
    vals = [fidelity_report(two, apply_channel_trajectory(two, spec, stream(1, "f", k))) for k in range(200)]
    assert 0.9 < np.mean(vals) < 1
    # the mean matches <psi| E(rho) |psi> from the density-matrix oracle
    three = class_state(SampleParams(ClassSpec(ClassKind.GHZ, 3), [0.6, 0.8]))
    vals = np.array([fidelity_report(three, apply_channel_trajectory(three, spec, stream(2, "f", k))) for k in range(4000)])
    a = three.amplitudes
    exact = float(np.real(a.conj() @ exact_channel_density(three, spec) @ a))
    assert abs(vals.mean() - exact) <= 3 * vals.std(ddof=1) / np.sqrt(vals.size)
