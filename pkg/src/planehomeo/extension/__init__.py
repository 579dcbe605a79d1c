"""Schoenflies charts, the arc partition and the fixed-point-free extension to the plane."""

from .charts import AnnulusChart, DiskChart, annulus_chart, disk_chart_with_boundary, schoenflies_chart
from .extend import AuditCheck, ExtendedHomeo, ExtensionReport, extend_homeo, verify_extension
from .partition import ArcPartition, build_partition, project_and_measure

__all__ = [
    "AnnulusChart", "DiskChart", "annulus_chart", "disk_chart_with_boundary", "schoenflies_chart",
    "AuditCheck", "ExtendedHomeo", "ExtensionReport", "extend_homeo", "verify_extension",
    "ArcPartition", "build_partition", "project_and_measure",
]
