"""Chemical-reaction demodulation toolkit.

Receptor-channel simulation (exact SSA and a voxel diffusion model),
log-posteriori demodulation filters, the Hill-fit molecular circuit with
annihilation readout, BER experiments, and the DCS2 promoter model.
"""

from chemodem._core import *  # noqa: F401,F403
from chemodem._core import ALL_BER_METHODS, __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
