"""
Command implementations and report emission.
"""
from .reports import ReportWriter, dumps, to_jsonable
from .runner import (
    ALIGNED_DIFFERENT,
    ALIGNED_NOT_DIFFERENT,
    EXIT_NOT_ALIGNED,
    EXIT_NOT_DIFFERENT,
    NOT_ALIGNED,
    CommandResult,
    GradientPipeline,
    cmd_cluster,
    cmd_compare,
    cmd_fit,
    cmd_report,
    cmd_synth,
    render_clusters,
    verdict,
    verdict_exit_code,
)

__all__ = [
    'ALIGNED_DIFFERENT', 'ALIGNED_NOT_DIFFERENT', 'EXIT_NOT_ALIGNED', 'EXIT_NOT_DIFFERENT',
    'NOT_ALIGNED', 'CommandResult', 'GradientPipeline', 'ReportWriter', 'cmd_cluster',
    'cmd_compare', 'cmd_fit', 'cmd_report', 'cmd_synth', 'dumps', 'render_clusters',
    'to_jsonable', 'verdict', 'verdict_exit_code',
]
