import pytest

from freehand_sar.geometry import ApertureSpec, RadarConfig, make_raster_trajectory
from freehand_sar.scene import GridSpec


@pytest.fixture(scope="session")
def radar_mono():
    return RadarConfig.monostatic()


@pytest.fixture(scope="session")
def small_aperture():
    return ApertureSpec(0.128, 0.128, 16, 16, 0.0)


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(32, 32, 0.2, 0.2, 0.3)


@pytest.fixture(scope="session")
def small_raster(small_aperture, radar_mono):
    return make_raster_trajectory(small_aperture, radar_mono, Z0=0.3)
