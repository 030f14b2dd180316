import numpy as np
import pytest

from qdm.imaging import (
    StateImage,
    dist_to_image,
    export_pgm,
    export_plotdata,
    image_shape,
    pgm_bytes,
    read_pgm,
    read_plotdata,
)


def onehot(i, n=8):
    d = np.zeros(2**n)
    d[i] = 1.0
    return d


def test_shapes():
    assert image_shape(8) == (16, 16)
    assert image_shape(3) == (4, 2)
    for n in range(1, 10):
        r, c = image_shape(n)
        assert r * c == 2**n


def test_pixel_mapping():
    assert dist_to_image(onehot(0), 8).pixels[0, 0] == 255
    assert dist_to_image(onehot(255), 8).pixels[15, 15] == 255
    img = dist_to_image(onehot(128), 8)
    assert img.pixels[8, 0] == 255 and img.pixels.sum() == 255


def test_round_trip_exact(rng):
    for n in (3, 8):
        d = rng.dirichlet(np.ones(2**n))
        img = dist_to_image(d, n)
        assert abs(img.pixels.sum() - 255) < 1e-6
        r, c = image_shape(n)
        back = np.array([img.pixels[idx // c, idx % c] / 255 for idx in range(2**n)])
        # scaling by 255 and back is exact up to one rounding step
        assert np.all(np.abs(back - d) <= np.spacing(d))


def test_length_checked():
    with pytest.raises(ValueError):
        dist_to_image(np.ones(8) / 8, 4)


def test_pgm(tmp_path):
    zero = StateImage(2, 4, np.zeros((2, 4)))
    text = pgm_bytes(zero).decode()
    assert text.split()[:4] == ["P2", "4", "2", "255"]
    assert set(text.split()[4:]) == {"0"}
    img = dist_to_image(onehot(0), 8)
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    export_pgm(img, a)
    export_pgm(img, b)
    assert a.read_bytes() == b.read_bytes()
    pix = read_pgm(a)
    assert pix[0, 0] == 255 and pix.sum() == 255


def test_pgm_quantizes_and_clamps():
    img = StateImage(1, 3, np.array([[-1.0, 12.4, 300.0]]))
    assert pgm_bytes(img).decode().split()[4:] == ["0", "12", "255"]


def test_plotdata(tmp_path):
    p = tmp_path / "p.csv"
    export_plotdata({}, p)
    assert p.read_text() == "series,x,y\n"
    export_plotdata({"s": ([0.25], [0.99])}, p)
    assert p.read_text().count("\n") == 2
    xs = [0.1, 1 / 3, 2.5e-17]
    ys = [np.pi, -0.0, 1e300]
    export_plotdata({"a": (xs, ys), "b": ([1], [2])}, p)
    back = read_plotdata(p)
    assert back["a"] == (xs, ys) and back["b"] == ([1.0], [2.0])
    with pytest.raises(ValueError):
        export_plotdata({"bad": ([1, 2], [1])}, p)
