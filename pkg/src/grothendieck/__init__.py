"""Grothendieck random partitions: exact measures, kernels, sampling and limit shapes."""
from .core import (GrothendieckError, ModelParams, NumericError, Partition, RegimeError,
                   UsageError, partition_to_particles, particles_to_partition, profile_of)
from .measures import GrothendieckModel, grothendieck_weight

__all__ = ["GrothendieckError", "GrothendieckModel", "ModelParams", "NumericError", "Partition",
           "RegimeError", "UsageError", "grothendieck_weight", "partition_to_particles",
           "particles_to_partition", "profile_of"]
