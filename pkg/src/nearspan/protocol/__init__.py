"""The distributed construction, one module per step of a phase."""

from .clusters import Cluster, ClusterCollection
from .construction import ExecutionTrace, PhaseArtifacts, build_spanner
from .interconnect import interconnect
from .popular import KnowledgeEntry, detect_popular
from .ruling import ruling_set
from .supercluster import supercluster

__all__ = [
    "Cluster",
    "ClusterCollection",
    "ExecutionTrace",
    "KnowledgeEntry",
    "PhaseArtifacts",
    "build_spanner",
    "detect_popular",
    "interconnect",
    "ruling_set",
    "supercluster",
]
