"""Downlink intercell interference power statistics on a hexagonal grid.

Library layout:

- geometry: 19-cell AP grid, canonical sector, area-uniform quadrature
- propagation: path loss, fading and shadowing factors, average path losses
- closed_form: hypoexponential law without shadowing, exact raw moments
- typical_set: single-link cdf/quantile machinery and the J x P point set
- mcp: panel combination of per-link sets with mean-preserving corrections
- burr_model: fitted truncated Burr model of the aggregate gain
- simulator: brute-force Monte Carlo reference
- config, cache, cli: scenario files, binary caching, subcommand interface
"""

from .burr_model import (BurrModel, ModelDomainError, ModelReport,
                         empirical_param, model_for, truncation_point)
from .closed_form import (hypoexp_cdf, hypoexp_coefficients, hypoexp_pdf,
                          multi_moment, single_moment)
from .config import Scenario, dump_scenario, load_scenario
from .geometry import NetworkLayout, sample_sector, sector_area, sector_vertices
from .mcp import (McpConfig, McpResult, PanelSet, WeightedHistogram,
                  add_noncompelled, combine_compelled, correction_factors,
                  loaded_probabilities, run_mcp)
from .propagation import XI, average_path_losses, natural_sigma, path_gain
from .simulator import SimResult, simulate_approx, simulate_exact
from .typical_set import (InversionError, PartitionSpec, TypicalSet,
                          build_typical_set, interval_masses, invert_cdf,
                          invert_sf, single_cdf, single_pdf, single_sf)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
