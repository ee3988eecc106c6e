"""Separable exact distance transforms, reverse distance transforms and
discrete medial axis extraction for d-dimensional binary images."""
import numba

# numba probes TBB first by default and warns on old installs; the layer
# is chosen at the first parallel launch, so this works after import too
if numba.config.THREADING_LAYER == "default":
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

from .balls import BallSet  # noqa: E402
from .errors import ContractError, DomainError, FormatError  # noqa: E402
from .redt import PowerField, power_labeling, reconstruct, redt_map  # noqa: E402
from .sdt import SdtResult, balls_of, sdt, voronoi_labeling  # noqa: E402
from .medial import rdma, rdma_reduce, sk_extract  # noqa: E402

__version__ = "0.1.0"
