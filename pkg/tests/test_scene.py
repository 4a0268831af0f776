import numpy as np
import pytest

from freehand_sar.scene import (
    Disk,
    GridSpec,
    RandomSceneSpec,
    Rect,
    RegularPolygon,
    Ring,
    Scene,
    discretize_scene,
    random_scene,
    rasterize_ideal,
)


class TestGridSpec:
    def test_cell_centers(self):
        grid = GridSpec(8, 8, 0.2, 0.2, 0.3)
        X, Y = grid.cell_centers()
        assert X.shape == Y.shape == (8, 8)
        assert X[0, 0] == pytest.approx(-0.1 + 0.5 * 0.025)
        assert X[0, -1] == pytest.approx(0.1 - 0.5 * 0.025)
        assert Y[0, 0] == Y[0, -1]  # row-major: y constant along a row

    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpec(4, 32, 0.2, 0.2, 0.3)
        with pytest.raises(ValueError):
            GridSpec(32, 32, -0.2, 0.2, 0.3)


class TestShapes:
    def setup_method(self):
        xs = np.linspace(-0.1, 0.1, 201)
        self.X, self.Y = np.meshgrid(xs, xs)

    def test_rect_containment(self):
        r = Rect((0.0, 0.0), 0.04, 0.02)
        m = r.mask(self.X, self.Y)
        assert m[100, 100]  # center
        assert not m[100, 100 + 25]  # x=0.025 > half-width

    def test_rect_rotation(self):
        r = Rect((0.0, 0.0), 0.08, 0.01, angle=np.pi / 2)
        m = r.mask(self.X, self.Y)
        # rotated 90 degrees: long axis now along y
        assert m[100 + 30, 100]
        assert not m[100, 100 + 30]

    def test_disk(self):
        d = Disk((0.02, 0.0), 0.01)
        m = d.mask(self.X, self.Y)
        assert m[100, 120]
        assert not m[100, 100]

    def test_ring_hole(self):
        ring = Ring((0.0, 0.0), 0.03, 0.015)
        m = ring.mask(self.X, self.Y)
        assert not m[100, 100]  # hole
        assert m[100, 120]  # r = 0.020 inside annulus
        with pytest.raises(ValueError):
            Ring((0, 0), 0.01, 0.02)

    def test_polygon(self):
        tri = RegularPolygon((0.0, 0.0), 0.03, 3)
        m = tri.mask(self.X, self.Y)
        assert m[100, 100]
        # area of an inscribed triangle is well under the circumcircle's
        disk_area = Disk((0, 0), 0.03).mask(self.X, self.Y).sum()
        assert 0.3 * disk_area < m.sum() < 0.5 * disk_area

    def test_polygon_hole(self):
        hexa = RegularPolygon((0.0, 0.0), 0.03, 6, hole_radius=0.01)
        assert not hexa.mask(self.X, self.Y)[100, 100]
        with pytest.raises(ValueError):
            RegularPolygon((0, 0), 0.03, 2)


class TestRandomScene:
    SPEC = RandomSceneSpec()

    def test_determinism(self):
        a = random_scene(self.SPEC, 123)
        b = random_scene(self.SPEC, 123)
        assert a == b
        assert random_scene(self.SPEC, 124) != a

    def test_counts_in_range(self):
        for seed in range(20):
            sc = random_scene(self.SPEC, seed)
            assert self.SPEC.n_points[0] <= len(sc.points) <= self.SPEC.n_points[1]
            assert self.SPEC.n_shapes[0] <= len(sc.shapes) <= self.SPEC.n_shapes[1]
            for (x, y, z), amp in sc.points:
                assert abs(x) <= 0.1 and abs(y) <= 0.1
                assert z == self.SPEC.target_plane_z
                assert self.SPEC.amplitude[0] <= amp <= self.SPEC.amplitude[1]

    def test_min_separation(self):
        for seed in range(20):
            sc = random_scene(self.SPEC, seed)
            xy = [p[:2] for p, _ in sc.points] + [sh.center for sh in sc.shapes]
            for i in range(len(xy)):
                for j in range(i + 1, len(xy)):
                    d = np.hypot(xy[i][0] - xy[j][0], xy[i][1] - xy[j][1])
                    assert d >= self.SPEC.min_separation

    def test_json_round_trip(self, tmp_path):
        sc = random_scene(self.SPEC, 77)
        path = tmp_path / "scene.json"
        sc.save(path)
        assert Scene.load(path) == sc


class TestRasterize:
    GRID = GridSpec(64, 64, 0.2, 0.2, 0.3)

    def test_range_and_peak(self):
        sc = random_scene(RandomSceneSpec(), 5)
        img = rasterize_ideal(sc, self.GRID)
        assert img.pixels.min() >= 0.0
        assert img.pixels.max() == pytest.approx(1.0)
        assert img.extent == (0.2, 0.2)

    def test_point_splat_center(self):
        X, Y = self.GRID.cell_centers()
        px, py = X[10, 20], Y[10, 20]
        sc = Scene(points=(((px, py, 0.3), 1.0),), shapes=(), target_plane_z=0.3)
        img = rasterize_ideal(sc, self.GRID)
        assert img.pixels[10, 20] == pytest.approx(1.0)
        assert img.pixels[10, 21] < 1.0

    def test_disjoint_max_composition(self):
        sc = Scene(
            points=(),
            shapes=(Disk((-0.05, 0.0), 0.02, amplitude=0.6),
                    Disk((0.05, 0.0), 0.02, amplitude=1.0)),
            target_plane_z=0.3,
        )
        img = rasterize_ideal(sc, self.GRID)
        X, Y = self.GRID.cell_centers()
        left = img.pixels[(X + 0.05) ** 2 + Y**2 <= 0.015**2]
        assert np.allclose(left, 0.6)

    def test_empty_scene(self):
        sc = Scene(points=(), shapes=(), target_plane_z=0.3)
        img = rasterize_ideal(sc, self.GRID)
        assert np.all(img.pixels == 0.0)


class TestDiscretize:
    GRID = GridSpec(64, 64, 0.2, 0.2, 0.3)

    def test_points_pass_through(self):
        sc = Scene(points=(((0.01, -0.02, 0.3), 0.7),), shapes=(), target_plane_z=0.3)
        pos, amp = discretize_scene(sc, self.GRID)
        assert pos.shape == (1, 3)
        assert tuple(pos[0]) == (0.01, -0.02, 0.3)
        assert amp[0] == 0.7

    def test_shape_fills_cells(self):
        disk = Disk((0.0, 0.0), 0.03, amplitude=0.9)
        sc = Scene(points=(), shapes=(disk,), target_plane_z=0.3)
        pos, amp = discretize_scene(sc, self.GRID)
        X, Y = self.GRID.cell_centers()
        expected = int(disk.mask(X, Y).sum())
        assert len(pos) == expected
        assert np.allclose(amp, 0.9)
        assert np.allclose(pos[:, 2], 0.3)

    def test_support_matches_rasterization(self):
        sc = random_scene(RandomSceneSpec(n_points=(0, 0)), 9)
        pos, _ = discretize_scene(sc, self.GRID)
        img = rasterize_ideal(sc, self.GRID)
        assert len(pos) == int(np.count_nonzero(img.pixels))

    def test_empty(self):
        sc = Scene(points=(), shapes=(), target_plane_z=0.3)
        pos, amp = discretize_scene(sc, self.GRID)
        assert pos.shape == (0, 3) and amp.shape == (0,)


def test_negative_amplitude_rejected():
    with pytest.raises(ValueError):
        Scene(points=(((0, 0, 0.3), -1.0),), shapes=(), target_plane_z=0.3)
