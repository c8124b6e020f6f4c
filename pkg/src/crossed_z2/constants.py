"""Constants."""

import pathlib

crossed_z2_proj_path: pathlib.Path = pathlib.Path(__file__).parent.parent.parent.absolute()
package_path: pathlib.Path = pathlib.Path(__file__).parent.absolute()
case_fixtures_path: pathlib.Path = package_path / "data" / "case_fixtures.json"

DEFAULT_ABS_TOL = 1e-10
DEFAULT_REL_TOL = 1e-8
DEFAULT_SEED = 42

ENV_ABS_TOL = "CROSSED_Z2_ABS_TOL"
ENV_REL_TOL = "CROSSED_Z2_REL_TOL"
ENV_SEED = "CROSSED_Z2_SEED"
ENV_LOG_LEVEL = "CROSSED_Z2_LOG_LEVEL"

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_TOLERANCE = 3
EXIT_PROPERTY_VIOLATION = 4

# decimals used when matrices enter sort keys or failure records
ROUND_DECIMALS = 8
