"""In-motion initial alignment by vector-observation attitude determination."""

# Lets a build-tree extension sit in a sibling directory on sys.path.
__path__ = __import__("pkgutil").extend_path(__path__, __name__)

from ._core import (  # noqa: E402
    AlignmentError,
    AmbiguousAverage,
    ConfigError,
    DataError,
    DegeneratePair,
    InvalidRotation,
    NumericalFailure,
    RankDeficiency,
    SingularityError,
    __version__,
    angle_between,
    dcm_from_quat,
    echo_config,
    error_quat_from_grp,
    euler_from_quat,
    grp_from_error_quat,
    quat_average,
    quat_from_dcm,
    quat_from_euler,
    quat_multiply,
    run,
    simulate,
    wahba_solve,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
