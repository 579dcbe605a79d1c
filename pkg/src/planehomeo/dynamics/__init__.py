from .degree import displacement_winding
from .escape import NON_ESCAPING, EscapeField, escape_map
from .fixed_points import FixedPointCertificate, FixedPointList, find_fixed_points, grid_margin
from .freedisk import FreeDiskResult, free_disk_check
from .periodic import ItineraryPower, PeriodicOrbitReport, find_periodic
from .verdict import Verdict, VerdictRecord, theorem_verdict

__all__ = [
    "displacement_winding", "NON_ESCAPING", "EscapeField", "escape_map", "FixedPointCertificate",
    "FixedPointList", "find_fixed_points", "grid_margin", "FreeDiskResult", "free_disk_check",
    "ItineraryPower", "PeriodicOrbitReport", "find_periodic", "Verdict", "VerdictRecord", "theorem_verdict",
]
