"""Near-field freehand MIMO-SAR simulation and reconstruction toolkit."""

from freehand_sar.geometry import (
    ApertureSpec,
    FreehandTrajectory,
    PerturbationSpec,
    RadarConfig,
    make_freehand_trajectory,
    make_raster_trajectory,
    perturb_trajectory,
    virtual_elements,
)
from freehand_sar.scene import (
    GridSpec,
    RandomSceneSpec,
    Scene,
    discretize_scene,
    random_scene,
    rasterize_ideal,
)
from freehand_sar.sarimage import SarImage
from freehand_sar.forward import RawData, add_noise, synthesize
from freehand_sar.empm import VirtualGrid, VirtualMonostaticData, beta, empm_compensate
from freehand_sar.reconstruct import bpa, empm_rma, rma
from freehand_sar.metrics import bench, psnr, rmse

__version__ = "0.1.0"
